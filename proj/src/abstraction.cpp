#include "intercore/abstraction.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "intercore/errors.hpp"

namespace intercore {

using ordered_json = nlohmann::ordered_json;

std::string abstraction_automaton(const std::string& core) { return "A_" + core; }

// ── Event specification ─────────────────────────────────────────────────────

EventSpec events_from_json(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("events.json: ") + e.what());
    }
    EventSpec spec;
    try {
        spec.events = root.at("events").get<std::vector<std::string>>();
        for (const auto& jp : root.at("producers")) {
            Producer p;
            p.task = jp.at("task").get<std::string>();
            p.segment = jp.at("segment").get<std::string>();
            for (const auto& je : jp.at("emits")) {
                EventProduction ev;
                ev.event = je.at("event").get<std::string>();
                ev.lb = je.at("lb").get<std::int64_t>();
                ev.rb = je.at("rb").get<std::int64_t>();
                p.emits.push_back(ev);
            }
            spec.producers.push_back(std::move(p));
        }
    } catch (const std::exception& e) {
        throw InputError(std::string("events.json: ") + e.what());
    }
    return spec;
}

std::vector<std::string> event_cores(const RtsSpec& r, const EventSpec& e) {
    std::set<std::string> touched;
    for (const Producer& p : e.producers)
        for (const Task& t : r.tasks)
            if (t.name == p.task) touched.insert(t.affinity);
    std::vector<std::string> out;
    for (const std::string& c : r.cores)
        if (touched.count(c)) out.push_back(c);
    return out;
}

const Task* producing_task(const RtsSpec& r, const EventSpec& e, const std::string& core) {
    const Task* found = nullptr;
    for (const Producer& p : e.producers) {
        for (const Task& t : r.tasks) {
            if (t.name != p.task || t.affinity != core) continue;
            if (found && found != &t) return nullptr;  // ambiguous
            found = &t;
        }
    }
    return found;
}

std::vector<const Producer*> task_producers(const EventSpec& e, const std::string& task) {
    std::vector<const Producer*> out;
    for (const Producer& p : e.producers)
        if (p.task == task) out.push_back(&p);
    return out;
}

std::vector<EventDiagnostic> validate_event_spec(const RtsSpec& r, const EventSpec& e) {
    std::vector<EventDiagnostic> out;
    auto err = [&out](std::string path, std::string msg, bool downgradable = false) {
        out.push_back(EventDiagnostic{EventDiagnostic::Severity::Error, downgradable,
                                      std::move(path), std::move(msg)});
    };
    auto warn = [&out](std::string path, std::string msg) {
        out.push_back(
            EventDiagnostic{EventDiagnostic::Severity::Warning, false, std::move(path), std::move(msg)});
    };

    std::set<std::string> events(e.events.begin(), e.events.end());
    if (events.size() != e.events.size()) err("events", "duplicate event name");
    if (e.events.empty()) err("events", "no events declared");

    std::map<std::string, const Task*> tasks;
    for (const Task& t : r.tasks) tasks[t.name] = &t;

    std::map<std::string, std::vector<const Producer*>> by_task;
    std::set<std::pair<std::string, std::string>> seen_segment;
    for (std::size_t pi = 0; pi < e.producers.size(); ++pi) {
        const Producer& p = e.producers[pi];
        std::ostringstream base;
        base << "producers[" << pi << "]";
        const std::string pp = base.str();
        auto ti = tasks.find(p.task);
        if (ti == tasks.end()) {
            err(pp + ".task", "unknown task '" + p.task + "'");
            continue;
        }
        const Task& t = *ti->second;
        const Segment* seg = nullptr;
        for (const Segment& s : t.segments)
            if (s.name == p.segment) seg = &s;
        if (!seg) {
            err(pp + ".segment", "task '" + p.task + "' has no segment '" + p.segment + "'");
            continue;
        }
        if (!seen_segment.emplace(p.task, p.segment).second)
            err(pp, "duplicate producer for segment '" + p.segment + "'");
        if (p.emits.empty()) err(pp + ".emits", "producer emits no events");
        for (std::size_t j = 0; j < p.emits.size(); ++j) {
            const EventProduction& ev = p.emits[j];
            std::ostringstream ep;
            ep << pp << ".emits[" << j << "]";
            if (!events.count(ev.event)) err(ep.str(), "undeclared event '" + ev.event + "'");
            if (ev.lb < 0 || ev.lb > ev.rb) err(ep.str(), "malformed interval");
            if (ev.rb > seg->wcet)
                err(ep.str(), "interval right bound exceeds the segment wcet");
            if (j > 0) {
                // Ordered production: bounds may overlap but must be ordered.
                if (ev.lb < p.emits[j - 1].lb || ev.rb < p.emits[j - 1].rb)
                    err(ep.str(), "event intervals must respect the production order");
            }
        }
        by_task[p.task].push_back(&p);
    }

    // Distinct affinities and |C_E| >= 2.
    std::map<std::string, std::vector<std::string>> core_tasks;
    for (const auto& [name, producers] : by_task) {
        const Task& t = *tasks.at(name);
        core_tasks[t.affinity].push_back(name);
    }
    for (const auto& [core, names] : core_tasks) {
        if (names.size() > 1) {
            std::string joined;
            for (const std::string& n : names) joined += (joined.empty() ? "" : ", ") + n;
            err("producers", "tasks {" + joined + "} share affinity '" + core +
                                 "'; exact abstractions require distinct affinities");
        }
    }
    if (core_tasks.size() < 2)
        err("producers", "events must occur on at least two cores");

    // Per-task job structure.
    for (const auto& [name, producers] : by_task) {
        const Task& t = *tasks.at(name);
        const auto jobs = enumerate_jobs(t);
        std::set<std::string> producing;
        for (const Producer* p : producers) producing.insert(p->segment);
        for (const auto& job : jobs) {
            int hits = 0;
            for (const std::string& s : job)
                if (producing.count(s)) ++hits;
            if (hits > 1)
                err("producers", "task '" + name + "': two producing segments share a job");
        }
        if (jobs.size() > 1) {
            warn("producers", "task '" + name +
                                  "' has multiple jobs; make sure the requirement asks for a bound "
                                  "that exists on every path");
            for (const auto& job : jobs) {
                bool covered = false;
                for (const std::string& s : job)
                    if (producing.count(s)) covered = true;
                if (!covered) {
                    std::string path;
                    for (const std::string& s : job) path += (path.empty() ? "" : ",") + s;
                    err("producers",
                        "task '" + name + "': job {" + path +
                            "} produces no event; the abstraction would not be exact",
                        /*downgradable=*/true);
                }
            }
        }
    }
    return out;
}

// ── Reference timelock ──────────────────────────────────────────────────────

TimedAutomaton build_ref_ta(std::int64_t hp) {
    if (hp <= 0) throw InputError("hyperperiod must be positive");
    TimedAutomaton ref;
    ref.name = "Ref";
    ref.clocks = {"x"};
    ref.locations.push_back(Location{"hper", {ClockAtom{"x", "", CmpOp::Le, hp}}, false, true});
    return ref;
}

Network ref_network(std::int64_t hp) {
    Network n;
    n.automata.push_back(build_ref_ta(hp));
    return n;
}

// ── Interval extraction (Algorithm: one bounds query per segment) ───────────

const SegmentIntervals* IvTable::find(const std::string& segment) const {
    for (const SegmentIntervals& s : segments)
        if (s.segment == segment) return &s;
    return nullptr;
}

IvTable compute_exact_intervals(const RtsSpec& r, const EventSpec& e, const std::string& core,
                                const IntervalOptions& opts) {
    const Task* tau = producing_task(r, e, core);
    if (!tau) throw InputError("core '" + core + "' does not have a unique producing task");
    const std::int64_t hp = hyperperiod(r, core);

    Network composed;
    if (opts.prebuilt) {
        composed = compose({*opts.prebuilt, ref_network(hp)});
    } else {
        composed = compose({build_core_network(r, core), ref_network(hp)});
    }

    ExploreOptions eopts;
    eopts.state_budget = opts.state_budget;
    eopts.query_clocks = {{"Ref", "x"}};
    eopts.query_clock_cap = hp + 1;
    ZoneGraph graph = build_zone_graph(composed, eopts);

    IvTable table;
    table.core = core;
    table.hyperperiod = hp;
    table.stats = graph.stats();

    for (const Producer* p : task_producers(e, tau->name)) {
        SegmentIntervals si;
        si.task = tau->name;
        si.segment = p->segment;
        si.first_event = p->emits.front().event;
        si.period = tau->period;
        si.periods = hp / tau->period;

        StateFormula phi;
        phi.locations.push_back({task_automaton(tau->name), p->segment});
        phi.locations.push_back({"Ref", "hper"});
        phi.clocks.push_back({{task_automaton(tau->name), "y"}, CmpOp::Ge, p->emits.front().lb});
        phi.clocks.push_back({{task_automaton(tau->name), "y"}, CmpOp::Le, p->emits.front().rb});
        si.global = query_bounds(graph, phi, {"Ref", "x"});

        if (opts.verbose)
            *opts.verbose << core << ": bounds{" << task_automaton(tau->name) << "." << p->segment
                          << " and " << p->emits.front().lb << " <= y <= " << p->emits.front().rb
                          << " and Ref.hper}: Ref.x = " << si.global.to_string() << "\n";

        // Group by period: an interval belongs to the period it starts in;
        // straddling intervals are split at the boundary, the boundary point
        // belonging to both pieces. Intervals at or beyond the hyperperiod
        // boundary belong to the next cycle and are dropped.
        si.per_period.assign(std::size_t(si.periods), IntervalSet{});
        for (const Interval& ivl : si.global.intervals()) {
            for (std::int64_t k = ivl.lb / tau->period + 1; k <= si.periods; ++k) {
                const std::int64_t lo = std::max(ivl.lb, (k - 1) * tau->period);
                const std::int64_t hi = std::min(ivl.rb, k * tau->period);
                if (lo > hi) break;
                si.per_period[std::size_t(k - 1)].add(lo, hi);
                if (ivl.rb <= k * tau->period) break;
            }
        }
        for (std::int64_t k = 1; k <= si.periods; ++k) {
            const IntervalSet& grouped = si.per_period[std::size_t(k - 1)];
            if (grouped.empty())
                throw ModelError("no production interval for segment '" + p->segment +
                                 "' in period " + std::to_string(k) + " on core '" + core + "'");
            if (opts.verbose)
                *opts.verbose << "  period " << k << ": " << grouped.to_string() << "\n";
        }
        table.segments.push_back(std::move(si));
    }
    return table;
}

IvTable coarsened(const IvTable& iv) {
    IvTable out = iv;
    for (SegmentIntervals& si : out.segments) {
        for (IntervalSet& set : si.per_period) {
            IntervalSet hull;
            hull.add(set.min(), set.max());
            set = hull;
        }
        IntervalSet g;
        for (const IntervalSet& set : si.per_period)
            for (const Interval& ivl : set.intervals()) g.add(ivl.lb, ivl.rb);
        si.global = g;
    }
    return out;
}

// ── Abstraction generation ──────────────────────────────────────────────────

namespace {

std::string loc_k(const std::string& seg, std::int64_t k) {
    return seg + "_" + std::to_string(k);
}
std::string loc_kij(const std::string& seg, std::int64_t k, std::int64_t i, std::int64_t j) {
    return seg + "_" + std::to_string(k) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

Edge emission(const std::string& from, const std::string& to, const std::string& event,
              std::vector<ClockAtom> guard, std::vector<std::string> resets) {
    Edge e;
    e.from = from;
    e.to = to;
    e.sync = SyncDir::Emit;
    e.channel = event;
    e.clock_guard = std::move(guard);
    e.resets = std::move(resets);
    return e;
}

// Builds the locations and edges for one producing segment of the task and
// appends them to the automaton. `wrap_target` is where the last period's
// final emission goes (wait), `next_of_k` the same-segment target for period
// k+1. Cross-job edges are added by the caller.
struct SegmentPiece {
    const Producer* producer;
    const SegmentIntervals* iv;
};

void generate_segment_locations(TimedAutomaton& a, const SegmentPiece& p) {
    const auto& emits = p.producer->emits;
    const std::int64_t m = std::int64_t(emits.size());
    const std::int64_t b1 = emits.front().rb;
    for (std::int64_t k = 1; k <= p.iv->periods; ++k) {
        const IntervalSet& ivk = p.iv->per_period[std::size_t(k - 1)];
        a.locations.push_back(Location{
            loc_k(p.producer->segment, k),
            {ClockAtom{"x", "", CmpOp::Le, ivk.intervals().back().rb}},
            false,
            false});
        for (std::int64_t i = 1; i <= std::int64_t(ivk.size()); ++i) {
            for (std::int64_t j = 2; j <= m; ++j) {
                const auto& ej = emits[std::size_t(j - 1)];
                const auto& eprev = emits[std::size_t(j - 2)];
                Location l;
                l.name = loc_kij(p.producer->segment, k, i, j);
                l.invariant.push_back(ClockAtom{
                    "x", "", CmpOp::Le, ivk.intervals()[std::size_t(i - 1)].rb + ej.rb - b1});
                l.invariant.push_back(ClockAtom{"y", "", CmpOp::Le, ej.rb - eprev.lb});
                a.locations.push_back(l);
            }
        }
    }
}

void generate_segment_edges(TimedAutomaton& a, const SegmentPiece& p, bool use_y,
                            const std::string& wrap_target) {
    const auto& emits = p.producer->emits;
    const std::string& seg = p.producer->segment;
    const std::int64_t m = std::int64_t(emits.size());
    const std::int64_t a1 = emits.front().lb;
    const std::int64_t K = p.iv->periods;
    for (std::int64_t k = 1; k <= K; ++k) {
        const IntervalSet& ivk = p.iv->per_period[std::size_t(k - 1)];
        for (std::int64_t i = 1; i <= std::int64_t(ivk.size()); ++i) {
            const Interval iv = ivk.intervals()[std::size_t(i - 1)];
            std::string succ;
            std::vector<std::string> reset;
            if (m != 1) {
                succ = loc_kij(seg, k, i, 2);
                if (use_y) reset = {"y"};
            } else {
                succ = k != K ? loc_k(seg, k + 1) : wrap_target;
            }
            a.edges.push_back(emission(loc_k(seg, k), succ, emits.front().event,
                                       {ClockAtom{"x", "", CmpOp::Ge, iv.lb},
                                        ClockAtom{"x", "", CmpOp::Le, iv.rb}},
                                       reset));
            for (std::int64_t j = 2; j <= m; ++j) {
                const auto& ej = emits[std::size_t(j - 1)];
                const auto& eprev = emits[std::size_t(j - 2)];
                std::string succ_j;
                std::vector<std::string> reset_j;
                if (j != m) {
                    succ_j = loc_kij(seg, k, i, j + 1);
                    if (use_y) reset_j = {"y"};
                } else {
                    succ_j = k != K ? loc_k(seg, k + 1) : wrap_target;
                }
                a.edges.push_back(emission(loc_kij(seg, k, i, j), succ_j, ej.event,
                                           {ClockAtom{"x", "", CmpOp::Ge, iv.lb + ej.lb - a1},
                                            ClockAtom{"y", "", CmpOp::Ge, ej.lb - eprev.rb}},
                                           reset_j));
            }
        }
    }
}

SegmentPiece piece_for(const Task& t, const IvTable& iv, const EventSpec& e,
                       const std::string& segment) {
    SegmentPiece p{nullptr, nullptr};
    for (const Producer* pr : task_producers(e, t.name))
        if (pr->segment == segment) p.producer = pr;
    p.iv = iv.find(segment);
    if (!p.producer || !p.iv)
        throw InputError("no intervals computed for segment '" + segment + "'");
    return p;
}

}  // namespace

TimedAutomaton generate_abstraction_single_job(const Task& t, const IvTable& iv,
                                               const EventSpec& e) {
    const auto producers = task_producers(e, t.name);
    if (producers.size() != 1)
        throw InputError("task '" + t.name + "' is not single-job for abstraction purposes");
    const SegmentPiece p = piece_for(t, iv, e, producers.front()->segment);
    const bool use_y = p.producer->emits.size() > 1;

    TimedAutomaton a;
    a.name = abstraction_automaton(t.affinity);
    a.clocks = {"x"};
    if (use_y) a.clocks.push_back("y");

    generate_segment_locations(a, p);
    a.locations.push_back(
        Location{"wait", {ClockAtom{"x", "", CmpOp::Le, iv.hyperperiod}}, false, false});
    // Initial location is the first period of the only segment.
    for (Location& l : a.locations)
        if (l.name == loc_k(p.producer->segment, 1)) l.initial = true;

    generate_segment_edges(a, p, use_y, "wait");

    Edge wrap;
    wrap.from = "wait";
    wrap.to = loc_k(p.producer->segment, 1);
    wrap.clock_guard.push_back(ClockAtom{"x", "", CmpOp::Eq, iv.hyperperiod});
    wrap.resets = {"x"};
    a.edges.push_back(wrap);
    return a;
}

TimedAutomaton generate_abstraction_general(const Task& t, const IvTable& iv, const EventSpec& e) {
    const auto producers = task_producers(e, t.name);
    if (producers.empty()) throw InputError("task '" + t.name + "' produces no events");
    if (producers.size() == 1) return generate_abstraction_single_job(t, iv, e);

    // Any multi-event segment brings in clock y for the whole automaton.
    bool use_y = false;
    for (const Producer* p : producers)
        if (p->emits.size() > 1) use_y = true;

    TimedAutomaton a;
    a.name = abstraction_automaton(t.affinity);
    a.clocks = {"x"};
    if (use_y) a.clocks.push_back("y");

    a.locations.push_back(Location{"act", {}, true, true});
    a.locations.push_back(
        Location{"wait", {ClockAtom{"x", "", CmpOp::Le, iv.hyperperiod}}, false, false});
    for (const Producer* p : producers)
        generate_segment_locations(a, piece_for(t, iv, e, p->segment));

    for (const Producer* p : producers) {
        Edge enter;
        enter.from = "act";
        enter.to = loc_k(p->segment, 1);
        a.edges.push_back(enter);
        generate_segment_edges(a, piece_for(t, iv, e, p->segment), use_y, "wait");
    }

    // Cross-job edges: finish period k producing via segment s, continue in
    // period k+1 with a different job's segment s'.
    for (const Producer* p : producers) {
        const SegmentPiece piece = piece_for(t, iv, e, p->segment);
        const auto& emits = p->emits;
        const std::int64_t m = std::int64_t(emits.size());
        const std::int64_t a1 = emits.front().lb;
        for (std::int64_t k = 1; k < piece.iv->periods; ++k) {
            const IntervalSet& ivk = piece.iv->per_period[std::size_t(k - 1)];
            for (std::int64_t i = 1; i <= std::int64_t(ivk.size()); ++i) {
                const Interval ivl = ivk.intervals()[std::size_t(i - 1)];
                for (const Producer* other : producers) {
                    if (other == p) continue;
                    const std::string target = loc_k(other->segment, k + 1);
                    if (m == 1) {
                        a.edges.push_back(emission(loc_k(p->segment, k), target,
                                                   emits.front().event,
                                                   {ClockAtom{"x", "", CmpOp::Ge, ivl.lb},
                                                    ClockAtom{"x", "", CmpOp::Le, ivl.rb}},
                                                   {}));
                    } else {
                        const auto& ej = emits[std::size_t(m - 1)];
                        const auto& eprev = emits[std::size_t(m - 2)];
                        a.edges.push_back(
                            emission(loc_kij(p->segment, k, i, m), target, ej.event,
                                     {ClockAtom{"x", "", CmpOp::Ge, ivl.lb + ej.lb - a1},
                                      ClockAtom{"y", "", CmpOp::Ge, ej.lb - eprev.rb}},
                                     {}));
                    }
                }
            }
        }
    }

    Edge wrap;
    wrap.from = "wait";
    wrap.to = "act";
    wrap.clock_guard.push_back(ClockAtom{"x", "", CmpOp::Eq, iv.hyperperiod});
    wrap.resets = {"x"};
    a.edges.push_back(wrap);
    return a;
}

Network abstraction_network(const RtsSpec& r, const EventSpec& e, const std::string& core,
                            const IvTable& iv) {
    const Task* tau = producing_task(r, e, core);
    if (!tau) throw InputError("core '" + core + "' does not have a unique producing task");
    Network n;
    for (const std::string& ev : e.events)
        n.channels.push_back(Channel{ev, ChannelKind::Broadcast, 0, ""});
    n.automata.push_back(generate_abstraction_general(*tau, iv, e));
    return n;
}

Network compose_abstract_network(const std::vector<Network>& parts) {
    if (parts.size() < 2)
        throw InputError("an abstract network needs at least two cores (|C_E| >= 2)");
    return compose(parts);
}

std::string intervals_to_json(const std::vector<IvTable>& tables) {
    ordered_json root;
    ordered_json cores = ordered_json::array();
    for (const IvTable& t : tables) {
        ordered_json jc;
        jc["core"] = t.core;
        jc["hyperperiod"] = t.hyperperiod;
        ordered_json segs = ordered_json::array();
        for (const SegmentIntervals& s : t.segments) {
            ordered_json js;
            js["task"] = s.task;
            js["segment"] = s.segment;
            js["first_event"] = s.first_event;
            js["period"] = s.period;
            ordered_json global = ordered_json::array();
            for (const Interval& iv : s.global.intervals())
                global.push_back(ordered_json::array({iv.lb, iv.rb}));
            js["global"] = global;
            ordered_json periods = ordered_json::array();
            for (std::size_t k = 0; k < s.per_period.size(); ++k) {
                ordered_json jp;
                jp["k"] = k + 1;
                ordered_json ivs = ordered_json::array();
                for (const Interval& iv : s.per_period[k].intervals())
                    ivs.push_back(ordered_json::array({iv.lb, iv.rb}));
                jp["intervals"] = ivs;
                periods.push_back(jp);
            }
            js["periods"] = periods;
            segs.push_back(js);
        }
        jc["segments"] = segs;
        cores.push_back(jc);
    }
    root["intervals"] = cores;
    return root.dump(2) + "\n";
}

}  // namespace intercore
