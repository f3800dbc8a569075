#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numeric>

#include "intercore/errors.hpp"
#include "intercore/oracle.hpp"
#include "intercore/pipeline.hpp"

namespace py = pybind11;
using namespace intercore;

namespace {

PipelineOptions make_options(bool coarse, bool force, int jobs, std::uint64_t state_budget) {
    PipelineOptions opts;
    opts.coarse = coarse;
    opts.force = force;
    opts.jobs = jobs;
    opts.state_budget = state_budget;
    return opts;
}

py::dict table_to_dict(const IvTable& t) {
    py::dict d;
    d["core"] = t.core;
    d["hyperperiod"] = t.hyperperiod;
    py::list segments;
    for (const SegmentIntervals& s : t.segments) {
        py::dict js;
        js["task"] = s.task;
        js["segment"] = s.segment;
        js["first_event"] = s.first_event;
        js["period"] = s.period;
        py::list periods;
        for (const IntervalSet& set : s.per_period) {
            py::list ivs;
            for (const Interval& iv : set.intervals()) ivs.append(py::make_tuple(iv.lb, iv.rb));
            periods.append(ivs);
        }
        js["periods"] = periods;
        segments.append(js);
    }
    d["segments"] = segments;
    return d;
}

py::list py_validate(const std::string& rts_path) {
    const RtsSpec r = rts_from_json(read_file(rts_path));
    py::list out;
    for (const Diagnostic& d : validate_rts(r)) {
        py::dict jd;
        jd["path"] = d.path;
        jd["message"] = d.message;
        out.append(jd);
    }
    return out;
}

py::dict py_schedulability(const std::string& rts_path, const std::string& core) {
    const RtsSpec r = parse_rts(rts_path);
    py::dict out;
    for (const std::string& c : r.cores) {
        if (!core.empty() && c != core) continue;
        const WcrtReport rep = check_schedulability(r, c);
        py::dict jc;
        jc["schedulable"] = rep.schedulable;
        py::dict tasks;
        for (const WcrtEntry& e : rep.tasks) tasks[py::str(e.task)] = e.wcrt;
        jc["wcrt"] = tasks;
        out[py::str(c)] = jc;
    }
    return out;
}

py::list py_intervals(const std::string& rts_path, const std::string& events_path, bool coarse,
                      bool force, int jobs) {
    const PipelineOptions opts = make_options(coarse, force, jobs, 50'000'000);
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);
    py::list out;
    for (const IvTable& t : run_intervals(in.rts, in.events, opts, &manifest))
        out.append(table_to_dict(coarse ? coarsened(t) : t));
    return out;
}

py::dict py_abstractions(const std::string& rts_path, const std::string& events_path, bool coarse,
                         bool force, int jobs) {
    const PipelineOptions opts = make_options(coarse, force, jobs, 50'000'000);
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);
    const AbstractionArtifacts art = run_abstract(in.rts, in.events, opts, &manifest);
    py::dict out;
    for (std::size_t i = 0; i < art.cores.size(); ++i)
        out[py::str(art.cores[i])] = network_to_json(art.abstractions[i]);
    return out;
}

py::dict py_bound(const std::string& rts_path, const std::string& events_path,
                  const std::string& req_path, bool coarse, bool force, int jobs) {
    const PipelineOptions opts = make_options(coarse, force, jobs, 50'000'000);
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);
    const Requirement req = parse_requirement(req_path, in.events);
    const BoundRecord rec = run_bound(in.rts, in.events, req, opts, &manifest);
    py::dict out;
    if (rec.satisfied) {
        out["bound"] = rec.bound;
    } else {
        out["bound"] = py::none();
    }
    out["unit"] = rec.unit;
    out["states_explored"] = rec.states_explored;
    out["wall_time"] = rec.wall_time;
    return out;
}

py::dict py_oracle_bound(const std::string& rts_path, const std::string& events_path,
                         const std::string& req_path, std::int64_t horizon, bool coarse) {
    const PipelineOptions opts = make_options(coarse, false, 1, 5'000'000);
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);
    const Requirement req = parse_requirement(req_path, in.events);

    std::int64_t lcm_hp = 1;
    for (const std::string& core : event_cores(in.rts, in.events))
        lcm_hp = std::lcm(lcm_hp, hyperperiod(in.rts, core));
    if (horizon <= 0) horizon = 4 * lcm_hp;

    std::vector<Network> parts;
    for (const std::string& core : event_cores(in.rts, in.events)) {
        IvTable iv = compute_exact_intervals(in.rts, in.events, core);
        if (coarse) iv = coarsened(iv);
        parts.push_back(abstraction_network(in.rts, in.events, core, iv));
    }
    const auto res = oracle_bound(compose_abstract_network(parts), req, horizon);
    py::dict out;
    if (res.satisfied) {
        out["bound"] = res.value;
    } else {
        out["bound"] = py::none();
    }
    return out;
}

py::list py_oracle_intervals(const std::string& rts_path, const std::string& events_path) {
    const PipelineOptions opts;
    RunManifest manifest;
    const LoadedInputs in = parse_inputs(rts_path, events_path, opts, &manifest);
    py::list out;
    for (const std::string& core : event_cores(in.rts, in.events)) {
        const Network nc = build_core_network(in.rts, core);
        out.append(table_to_dict(
            oracle_intervals(nc, in.rts, in.events, core, hyperperiod(in.rts, core))));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(intercore, m) {
    m.doc() = "Exact inter-core timing bounds for schedulable multicore real-time systems";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

    m.def("version", &version_string, "toolkit version string");
    m.def("validate_rts", &py_validate, py::arg("rts_path"),
          "validate an rts.json; returns a list of diagnostics");
    m.def("schedulability", &py_schedulability, py::arg("rts_path"), py::arg("core") = "",
          "per-core schedulability verdicts with per-task worst-case response times");
    m.def("intervals", &py_intervals, py::arg("rts_path"), py::arg("events_path"),
          py::arg("coarse") = false, py::arg("force") = false, py::arg("jobs") = 1,
          "exact absolute event-production intervals per core and period");
    m.def("abstractions", &py_abstractions, py::arg("rts_path"), py::arg("events_path"),
          py::arg("coarse") = false, py::arg("force") = false, py::arg("jobs") = 1,
          "per-core abstraction networks as serialized ta-network JSON");
    m.def("bound", &py_bound, py::arg("rts_path"), py::arg("events_path"), py::arg("req_path"),
          py::arg("coarse") = false, py::arg("force") = false, py::arg("jobs") = 1,
          "inter-core bound record; bound is None when the chain never completes");
    m.def("oracle_bound", &py_oracle_bound, py::arg("rts_path"), py::arg("events_path"),
          py::arg("req_path"), py::arg("horizon") = 0, py::arg("coarse") = false,
          "digitized brute-force bound for cross-checking");
    m.def("oracle_intervals", &py_oracle_intervals, py::arg("rts_path"), py::arg("events_path"),
          "digitized brute-force intervals for cross-checking");
}
