// Command-line front end: validate -> schedulability -> intervals ->
// abstract -> bound, plus digitized oracle cross-checks.

#include <iostream>
#include <numeric>
#include <set>

#include <CLI11.hpp>

#include "intercore/errors.hpp"
#include "intercore/oracle.hpp"
#include "intercore/pipeline.hpp"

using namespace intercore;

namespace {

int run_validate(const std::string& rts_path) {
    RtsSpec r = rts_from_json(read_file(rts_path));
    const auto diags = validate_rts(r);
    for (const Diagnostic& d : diags)
        std::cerr << rts_path << ": " << d.path << ": " << d.message << "\n";
    if (diags.empty()) {
        std::cout << "ok: " << r.tasks.size() << " tasks on " << r.cores.size() << " cores";
        for (const std::string& c : r.cores) std::cout << " hp_" << c << "=" << hyperperiod(r, c);
        std::cout << "\n";
        return 0;
    }
    return 1;
}

int run_schedulability(const std::string& rts_path, const std::string& core_filter,
                       std::uint64_t budget) {
    RtsSpec r = parse_rts(rts_path);
    bool all_ok = true;
    for (const std::string& core : r.cores) {
        if (!core_filter.empty() && core != core_filter) continue;
        const WcrtReport rep = check_schedulability(r, core, budget);
        std::cout << core << ": " << (rep.schedulable ? "schedulable" : "NOT schedulable") << " ("
                  << rep.stats.states_stored << " states)\n";
        for (const WcrtEntry& e : rep.tasks) {
            std::cout << "  " << e.task << ": wcrt=" << e.wcrt << " period=" << e.period << " "
                      << (e.ok ? "ok" : "MISS") << "\n";
        }
        if (!rep.schedulable) all_ok = false;
    }
    return all_ok ? 0 : 1;
}

int run_intervals_cmd(const std::string& rts_path, const std::string& events_path,
                      const std::string& out_path, const PipelineOptions& opts) {
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);
    const auto tables = run_intervals(in.rts, in.events, opts, &manifest);
    write_file(out_path, intervals_to_json(tables));
    for (const IvTable& t : tables) {
        for (const SegmentIntervals& s : t.segments) {
            std::cout << t.core << " " << s.segment << " (" << s.first_event << "):";
            for (std::size_t k = 0; k < s.per_period.size(); ++k)
                std::cout << " Iv" << k + 1 << "=" << s.per_period[k].to_string();
            std::cout << "\n";
        }
    }
    std::cerr << "wrote " << out_path << "\n";
    return 0;
}

int run_abstract_cmd(const std::string& rts_path, const std::string& events_path,
                     const std::string& out_dir, const PipelineOptions& opts) {
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);
    const AbstractionArtifacts art = run_abstract(in.rts, in.events, opts, &manifest);
    for (std::size_t i = 0; i < art.cores.size(); ++i) {
        if (opts.xta_dir.empty())
            write_file(out_dir + "/N_" + art.cores[i] + ".ta.json",
                       network_to_json(art.core_networks[i]));
        write_file(out_dir + "/A_" + art.cores[i] + ".ta.json",
                   network_to_json(art.abstractions[i]));
    }
    write_file(out_dir + "/intervals.json", intervals_to_json(art.tables));
    write_file(out_dir + "/manifest.json", manifest.to_json());
    std::cerr << "wrote " << art.cores.size() << " abstraction(s) to " << out_dir << "\n";
    return 0;
}

int run_bounds_cmd(const std::string& rts_path, const std::string& events_path,
                   const std::string& req_path, const PipelineOptions& opts) {
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);
    const Requirement req = parse_requirement(req_path, in.events);
    const BoundRecord record = run_bound(in.rts, in.events, req, opts, &manifest);
    std::cout << record.to_json_line() << "\n";
    return 0;
}

int run_oracle_cmd(const std::string& rts_path, const std::string& events_path,
                   const std::string& req_path, std::int64_t horizon, const std::string& csv_path,
                   const PipelineOptions& opts) {
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);

    std::int64_t lcm_hp = 1;
    for (const std::string& core : event_cores(in.rts, in.events))
        lcm_hp = std::lcm(lcm_hp, hyperperiod(in.rts, core));
    if (horizon <= 0) horizon = 2 * lcm_hp;

    DigitizedOptions dopts;
    dopts.state_budget = opts.state_budget;
    for (const std::string& core : event_cores(in.rts, in.events)) {
        const Network nc = build_core_network(in.rts, core);
        const IvTable iv = oracle_intervals(nc, in.rts, in.events, core,
                                            std::min(horizon, hyperperiod(in.rts, core)), dopts);
        for (const SegmentIntervals& s : iv.segments) {
            std::cout << "oracle " << core << " " << s.segment << " (" << s.first_event << "):";
            for (std::size_t k = 0; k < s.per_period.size(); ++k)
                std::cout << " Iv" << k + 1 << "=" << s.per_period[k].to_string();
            std::cout << "\n";
        }
    }

    std::vector<Network> parts;
    for (const std::string& core : event_cores(in.rts, in.events)) {
        IntervalOptions iopts;
        iopts.state_budget = opts.state_budget;
        IvTable iv = compute_exact_intervals(in.rts, in.events, core, iopts);
        if (opts.coarse) iv = coarsened(iv);
        parts.push_back(abstraction_network(in.rts, in.events, core, iv));
    }
    const Network composed = compose_abstract_network(parts);

    if (!csv_path.empty()) {
        const DigitizedGraph g = digitized_explore(composed, horizon, dopts);
        std::ostringstream csv;
        csv << "event,time\n";
        for (const std::string& ev : in.events.events)
            for (std::int64_t t : emission_instants(g, ev)) csv << ev << "," << t << "\n";
        write_file(csv_path, csv.str());
        std::cerr << "wrote " << csv_path << "\n";
    }

    if (!req_path.empty()) {
        const Requirement req = parse_requirement(req_path, in.events);
        const auto res = oracle_bound(composed, req, horizon, dopts);
        if (res.satisfied) {
            std::cout << "oracle bound: " << res.value << " " << in.rts.time_unit << "\n";
        } else {
            std::cout << "oracle bound: unsatisfied\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact inter-core bounds for schedulable multicore real-time systems"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    PipelineOptions opts;
    opts.log = &std::cerr;
    std::string rts_path, events_path, req_path, out_path, core_filter, csv_path;
    std::int64_t horizon = 0;

    app.add_option("--jobs", opts.jobs, "max concurrent per-core explorations")
        ->capture_default_str();
    app.add_option("--state-budget", opts.state_budget, "stored-state budget per exploration")
        ->capture_default_str();

    auto* validate = app.add_subcommand("validate", "check an rts.json against the input rules");
    validate->add_option("rts", rts_path, "rts.json")->required();

    auto* sched = app.add_subcommand("schedulability", "per-task worst-case response times");
    sched->add_option("rts", rts_path, "rts.json")->required();
    sched->add_option("--core", core_filter, "restrict to one core");

    auto* intervals = app.add_subcommand("intervals", "exact event-production intervals");
    intervals->add_option("rts", rts_path, "rts.json")->required();
    intervals->add_option("events", events_path, "events.json")->required();
    intervals->add_option("-o,--output", out_path, "intervals.json path")
        ->default_val("intervals.json");
    intervals->add_flag("--verbose", opts.verbose, "print interval grouping steps");

    auto* abstract = app.add_subcommand("abstract", "generate exact abstraction networks");
    abstract->add_option("rts", rts_path, "rts.json")->required();
    abstract->add_option("events", events_path, "events.json")->required();
    abstract->add_option("-o,--output", out_path, "output directory")->required();
    abstract->add_flag("--force", opts.force, "keep going when a job produces no event");
    abstract->add_flag("--coarse", opts.coarse, "coarse per-period hulls (hole-prone)");
    abstract->add_flag("--verbose", opts.verbose, "print interval grouping steps");
    abstract->add_option("--xta", opts.xta_dir, "directory with pre-built N_<core>.ta.json files");

    auto* bound = app.add_subcommand("bound", "compute an inter-core bound");
    bound->add_option("rts", rts_path, "rts.json")->required();
    bound->add_option("events", events_path, "events.json")->required();
    bound->add_option("req", req_path, "req.json")->required();
    bound->add_flag("--force", opts.force, "keep going when a job produces no event");
    bound->add_flag("--coarse", opts.coarse, "coarse abstractions instead of exact ones");
    bound->add_option("--xta", opts.xta_dir, "directory with pre-built N_<core>.ta.json files");

    auto* oracle = app.add_subcommand("oracle", "digitized brute-force cross-check");
    oracle->add_option("rts", rts_path, "rts.json")->required();
    oracle->add_option("events", events_path, "events.json")->required();
    oracle->add_option("req", req_path, "req.json (optional)");
    oracle->add_option("--horizon", horizon,
                       "exploration horizon (default 2 x lcm of hyperperiods)");
    oracle->add_option("--csv", csv_path, "dump (event, time) pairs to a CSV file");
    oracle->add_flag("--coarse", opts.coarse, "use coarse abstractions");
    oracle->add_flag("--force", opts.force, "keep going when a job produces no event");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return run_validate(rts_path);
        if (sched->parsed()) return run_schedulability(rts_path, core_filter, opts.state_budget);
        if (intervals->parsed()) return run_intervals_cmd(rts_path, events_path, out_path, opts);
        if (abstract->parsed()) return run_abstract_cmd(rts_path, events_path, out_path, opts);
        if (bound->parsed()) return run_bounds_cmd(rts_path, events_path, req_path, opts);
        if (oracle->parsed())
            return run_oracle_cmd(rts_path, events_path, req_path, horizon, csv_path, opts);
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
