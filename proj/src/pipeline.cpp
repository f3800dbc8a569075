#include "intercore/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "intercore/errors.hpp"

namespace intercore {

using ordered_json = nlohmann::ordered_json;

std::string version_string() { return "0.1.0"; }

std::string fnv1a64_digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return "fnv1a64:" + os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path);
    f << content;
}

void RunManifest::add_input(const std::string& path) {
    inputs.emplace_back(path, fnv1a64_digest(read_file(path)));
}

std::string RunManifest::to_json() const {
    ordered_json root;
    root["tool_version"] = tool_version;
    ordered_json in = ordered_json::array();
    for (const auto& [path, digest] : inputs)
        in.push_back(ordered_json{{"path", path}, {"digest", digest}});
    root["inputs"] = in;
    ordered_json st = ordered_json::array();
    for (const StageInfo& s : stages) {
        ordered_json js;
        js["name"] = s.name;
        js["states"] = s.states;
        js["wall_ms"] = s.wall_ms;
        st.push_back(js);
    }
    root["stages"] = st;
    root["warnings"] = warnings;
    return root.dump(2) + "\n";
}

RtsSpec parse_rts(const std::string& rts_path) {
    RtsSpec r = rts_from_json(read_file(rts_path));
    auto diags = validate_rts(r);
    if (!diags.empty()) {
        std::ostringstream os;
        os << rts_path << ": " << diags.size() << " diagnostic(s):";
        for (const Diagnostic& d : diags) os << "\n  " << d.path << ": " << d.message;
        throw InputError(os.str());
    }
    return r;
}

LoadedInputs parse_inputs(const std::string& rts_path, const std::string& events_path,
                          const PipelineOptions& opts, RunManifest* manifest) {
    LoadedInputs in;
    in.rts = parse_rts(rts_path);
    in.events = events_from_json(read_file(events_path));
    if (manifest) {
        manifest->tool_version = version_string();
        manifest->add_input(rts_path);
        manifest->add_input(events_path);
    }

    auto diags = validate_event_spec(in.rts, in.events);
    std::ostringstream errors;
    int error_count = 0;
    for (const EventDiagnostic& d : diags) {
        if (d.severity == EventDiagnostic::Severity::Warning) {
            if (manifest) manifest->warnings.push_back(d.path + ": " + d.message);
            if (opts.log) *opts.log << "warning: " << d.path << ": " << d.message << "\n";
            continue;
        }
        if (d.force_downgradable && opts.force) {
            const std::string note =
                d.path + ": " + d.message + " (forced: exactness is the user's responsibility)";
            if (manifest) manifest->warnings.push_back(note);
            if (opts.log) *opts.log << "warning: " << note << "\n";
            continue;
        }
        errors << "\n  " << d.path << ": " << d.message;
        ++error_count;
    }
    if (error_count > 0)
        throw InputError(events_path + ": " + std::to_string(error_count) + " error(s):" +
                         errors.str());
    return in;
}

Requirement parse_requirement(const std::string& req_path, const EventSpec& events) {
    Requirement req = requirement_from_json(read_file(req_path));
    auto diags = validate_requirement(req, events);
    if (!diags.empty()) {
        std::ostringstream os;
        os << req_path << ":";
        for (const Diagnostic& d : diags) os << "\n  " << d.path << ": " << d.message;
        throw InputError(os.str());
    }
    return req;
}

namespace {

// Runs fn(i) for i in [0, n) on at most `jobs` worker threads. The first
// exception wins and is rethrown after all workers drain.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex mu;
    std::size_t next = 0;
    std::exception_ptr error;
    auto worker = [&]() {
        while (true) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (error || next >= n) return;
                i = next++;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int count = std::min<int>(jobs, int(n));
    for (int i = 0; i < count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

Network load_or_build_core(const RtsSpec& r, const std::string& core,
                           const PipelineOptions& opts) {
    if (opts.xta_dir.empty()) return build_core_network(r, core);
    const std::string path = opts.xta_dir + "/N_" + core + ".ta.json";
    Network n = network_from_json(read_file(path));
    auto diags = validate_network(n);
    if (!diags.empty())
        throw InputError(path + ": " + diags.front().path + ": " + diags.front().message);
    return n;
}

}  // namespace

std::vector<IvTable> run_intervals(const RtsSpec& r, const EventSpec& e,
                                   const PipelineOptions& opts, RunManifest* manifest) {
    const std::vector<std::string> cores = event_cores(r, e);
    std::vector<IvTable> tables(cores.size());
    std::vector<Network> networks(cores.size());
    std::vector<double> wall(cores.size());
    std::mutex log_mu;

    parallel_for(cores.size(), opts.jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        networks[i] = load_or_build_core(r, cores[i], opts);
        IntervalOptions iopts;
        iopts.state_budget = opts.state_budget;
        iopts.prebuilt = &networks[i];
        std::ostringstream verbose;
        if (opts.verbose) iopts.verbose = &verbose;
        tables[i] = compute_exact_intervals(r, e, cores[i], iopts);
        wall[i] = ms_since(start);
        if (opts.verbose && opts.log) {
            std::lock_guard<std::mutex> lock(log_mu);
            *opts.log << verbose.str();
        }
    });
    if (manifest) {
        for (std::size_t i = 0; i < cores.size(); ++i)
            manifest->stages.push_back(
                StageInfo{"intervals:" + cores[i], tables[i].stats.states_stored, wall[i]});
    }
    return tables;
}

AbstractionArtifacts run_abstract(const RtsSpec& r, const EventSpec& e,
                                  const PipelineOptions& opts, RunManifest* manifest) {
    AbstractionArtifacts art;
    art.cores = event_cores(r, e);
    if (art.cores.size() < 2)
        throw InputError("events must occur on at least two cores (|C_E| >= 2)");
    art.core_networks.resize(art.cores.size());
    art.tables.resize(art.cores.size());
    art.abstractions.resize(art.cores.size());
    std::vector<double> wall(art.cores.size());

    parallel_for(art.cores.size(), opts.jobs, [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        art.core_networks[i] = load_or_build_core(r, art.cores[i], opts);
        IntervalOptions iopts;
        iopts.state_budget = opts.state_budget;
        iopts.prebuilt = &art.core_networks[i];
        IvTable iv = compute_exact_intervals(r, e, art.cores[i], iopts);
        if (opts.coarse) iv = coarsened(iv);
        art.abstractions[i] = abstraction_network(r, e, art.cores[i], iv);
        art.tables[i] = std::move(iv);
        wall[i] = ms_since(start);
    });
    if (manifest) {
        for (std::size_t i = 0; i < art.cores.size(); ++i)
            manifest->stages.push_back(StageInfo{"abstract:" + art.cores[i],
                                                 art.tables[i].stats.states_stored, wall[i]});
    }
    return art;
}

BoundRecord run_bound(const RtsSpec& r, const EventSpec& e, const Requirement& req,
                      const PipelineOptions& opts, RunManifest* manifest) {
    const auto start = std::chrono::steady_clock::now();
    AbstractionArtifacts art = run_abstract(r, e, opts, manifest);
    Network composed = compose_abstract_network(art.abstractions);

    std::int64_t lcm_hp = 1;
    for (const std::string& core : art.cores) lcm_hp = std::lcm(lcm_hp, hyperperiod(r, core));

    BoundOptions bopts;
    bopts.state_budget = opts.state_budget;
    // Valid chains complete within two inter-occurrence gaps, each at most
    // two periods of the producing task.
    bopts.observer_cap = 4 * lcm_hp + 1;
    const BoundResult res = compute_bound(composed, req, bopts);

    BoundRecord record;
    record.satisfied = res.satisfied;
    record.bound = res.value;
    record.unit = r.time_unit;
    record.states_explored = res.stats.states_stored;
    for (const IvTable& t : art.tables) record.states_explored += t.stats.states_stored;
    record.wall_time = ms_since(start) / 1000.0;
    if (manifest)
        manifest->stages.push_back(StageInfo{"bound", res.stats.states_stored,
                                             ms_since(start)});
    return record;
}

std::string BoundRecord::to_json_line() const {
    ordered_json j;
    if (satisfied) {
        j["bound"] = bound;
    } else {
        j["bound"] = "unsatisfied";
        j["hint"] = "the chain never completes; check the requirement's validity";
    }
    j["unit"] = unit;
    j["states_explored"] = states_explored;
    j["wall_time"] = wall_time;
    return j.dump();
}

}  // namespace intercore
