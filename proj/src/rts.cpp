#include "intercore/rts.hpp"

#include <algorithm>
#include <map>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "intercore/abstraction.hpp"
#include "intercore/errors.hpp"

namespace intercore {

using ordered_json = nlohmann::ordered_json;

std::string ins_channel(const std::string& core) { return "ins_" + core; }
std::string cmp_channel(const std::string& core) { return "cmp_" + core; }
std::string ter_channel(const std::string& core) { return "ter_" + core; }
std::string pre_channel(const std::string& core) { return "pre_" + core; }
std::string exe_channel(const std::string& core) { return "exe_" + core; }
std::string rel_channel(const std::string& core, const std::string& task) {
    return "rel_" + core + "_" + task;
}
std::string queue_var(const std::string& core) { return "Q_" + core; }
std::string running_var(const std::string& core) { return "running_" + core; }
std::string task_automaton(const std::string& task) { return "TA_" + task; }
std::string scheduler_automaton(const std::string& core) { return "H_" + core; }

namespace {

// Successors of a state in the task FSM, segments in declaration order with
// end last.
std::vector<std::string> fsm_successors(const Task& t, const std::string& from) {
    std::vector<std::string> segs;
    bool to_end = false;
    for (const auto& [a, b] : t.fsm.transitions) {
        if (a != from) continue;
        if (b == "end") {
            to_end = true;
        } else {
            segs.push_back(b);
        }
    }
    std::map<std::string, std::size_t> order;
    for (std::size_t i = 0; i < t.segments.size(); ++i) order[t.segments[i].name] = i;
    std::sort(segs.begin(), segs.end(),
              [&order](const std::string& a, const std::string& b) { return order[a] < order[b]; });
    if (to_end) segs.push_back("end");
    return segs;
}

const Segment* find_segment(const Task& t, const std::string& name) {
    for (const Segment& s : t.segments)
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace

std::vector<Diagnostic> validate_rts(const RtsSpec& r) {
    std::vector<Diagnostic> out;
    auto err = [&out](std::string path, std::string msg) {
        out.push_back(Diagnostic{std::move(path), std::move(msg)});
    };

    std::set<std::string> cores(r.cores.begin(), r.cores.end());
    if (cores.size() != r.cores.size()) err("cores", "duplicate core name");
    if (r.cores.empty()) err("cores", "no cores declared");

    std::set<std::string> task_names;
    std::map<std::string, std::set<std::int64_t>> core_prios;
    std::map<std::string, int> core_tasks;
    for (std::size_t ti = 0; ti < r.tasks.size(); ++ti) {
        const Task& t = r.tasks[ti];
        std::ostringstream base;
        base << "tasks[" << ti << "]";
        const std::string tp = base.str();
        if (!task_names.insert(t.name).second) err(tp, "duplicate task name '" + t.name + "'");
        if (t.period <= 0) err(tp + ".period", "period must be positive");
        if (!cores.count(t.affinity))
            err(tp + ".affinity", "undeclared core '" + t.affinity + "'");
        else
            ++core_tasks[t.affinity];
        if (!core_prios[t.affinity].insert(t.priority).second)
            err(tp + ".priority", "duplicate priority within partition '" + t.affinity + "'");

        std::set<std::string> seg_names;
        for (std::size_t si = 0; si < t.segments.size(); ++si) {
            const Segment& s = t.segments[si];
            std::ostringstream sp;
            sp << tp << ".segments[" << si << "]";
            if (!seg_names.insert(s.name).second) err(sp.str(), "duplicate segment name");
            if (s.bcet <= 0) err(sp.str(), "bcet must be positive");
            if (s.bcet > s.wcet) err(sp.str(), "bcet > wcet");
        }

        // FSM shape: act has no predecessors, end no successors, references
        // resolve, the segment graph is acyclic and every segment lies on an
        // act->end path.
        std::map<std::string, std::vector<std::string>> succ;
        bool refs_ok = true;
        for (const auto& [a, b] : t.fsm.transitions) {
            if (a == "end") err(tp + ".fsm", "transition out of end");
            if (b == "act") err(tp + ".fsm", "transition into act");
            for (const std::string& v : {a, b}) {
                if (v != "act" && v != "end" && !seg_names.count(v)) {
                    err(tp + ".fsm", "unknown state '" + v + "'");
                    refs_ok = false;
                }
            }
            succ[a].push_back(b);
        }
        if (!refs_ok) continue;

        // Cycle check over segments (DFS with colors).
        std::map<std::string, int> color;
        bool cyclic = false;
        std::vector<std::pair<std::string, std::size_t>> stack;
        auto visit = [&](const std::string& start) {
            if (color[start]) return;
            stack.emplace_back(start, 0);
            color[start] = 1;
            while (!stack.empty()) {
                auto& [node, idx] = stack.back();
                const auto& ns = succ[node];
                if (idx >= ns.size()) {
                    color[node] = 2;
                    stack.pop_back();
                    continue;
                }
                const std::string next = ns[idx++];
                if (next == "end") continue;
                if (color[next] == 1) {
                    cyclic = true;
                    stack.clear();
                    return;
                }
                if (color[next] == 0) {
                    color[next] = 1;
                    stack.emplace_back(next, 0);
                }
            }
        };
        visit("act");
        if (cyclic) {
            err(tp + ".fsm", "segment graph has a cycle");
            continue;
        }
        // Reachability from act and co-reachability of end.
        std::set<std::string> reach;
        std::vector<std::string> work{"act"};
        while (!work.empty()) {
            std::string v = work.back();
            work.pop_back();
            for (const std::string& w : succ[v])
                if (w != "end" && reach.insert(w).second) work.push_back(w);
        }
        std::map<std::string, std::vector<std::string>> pred;
        for (const auto& [a, b] : t.fsm.transitions) pred[b].push_back(a);
        std::set<std::string> coreach;
        work = pred["end"];
        while (!work.empty()) {
            std::string v = work.back();
            work.pop_back();
            if (v == "act") continue;
            if (coreach.insert(v).second)
                for (const std::string& w : pred[v]) work.push_back(w);
        }
        for (const Segment& s : t.segments) {
            if (!reach.count(s.name) || !coreach.count(s.name))
                err(tp + ".fsm", "segment '" + s.name + "' is not on an act->end path");
        }
        if (succ["act"].empty()) err(tp + ".fsm", "act has no successors");
    }

    for (const std::string& c : r.cores) {
        if (core_tasks[c] == 0) err("cores", "core '" + c + "' has no tasks");
    }
    return out;
}

std::int64_t hyperperiod(const RtsSpec& r, const std::string& core) {
    std::int64_t hp = 1;
    bool any = false;
    for (const Task& t : r.tasks) {
        if (t.affinity != core) continue;
        hp = std::lcm(hp, t.period);
        any = true;
    }
    if (!any) throw InputError("core '" + core + "' has no tasks");
    return hp;
}

std::vector<Task> partition_of(const RtsSpec& r, const std::string& core) {
    std::vector<Task> out;
    for (const Task& t : r.tasks)
        if (t.affinity == core) out.push_back(t);
    return out;
}

std::vector<std::vector<std::string>> enumerate_jobs(const Task& t) {
    std::vector<std::vector<std::string>> jobs;
    std::vector<std::string> path;
    // DFS in declaration order; a maximal path ends when "end" is reached.
    std::function<void(const std::string&)> walk = [&](const std::string& node) {
        for (const std::string& next : fsm_successors(t, node)) {
            if (next == "end") {
                jobs.push_back(path);
            } else {
                path.push_back(next);
                walk(next);
                path.pop_back();
            }
        }
    };
    walk("act");
    return jobs;
}

TimedAutomaton generate_task_ta(const Task& t, const CoreContext& ctx) {
    TimedAutomaton a;
    a.name = task_automaton(t.name);
    a.clocks = {"x", "y"};

    // start: committed initial; handles the activation at time 0.
    a.locations.push_back(Location{"start", {}, true, true});
    // wait: next activation at x == P, enforced by the invariant.
    a.locations.push_back(
        Location{"wait", {ClockAtom{"x", "", CmpOp::Le, t.period}}, false, false});
    // act: inserted in the queue, waiting for release; time to release unknown.
    a.locations.push_back(Location{"act", {}, false, false});
    for (const Segment& s : t.segments)
        a.locations.push_back(
            Location{s.name, {ClockAtom{"y", "", CmpOp::Le, s.wcet}}, false, false});
    // Preemption locations only where the task can be forced off the core:
    // a lower-priority task at a segment with a segment successor.
    std::set<std::string> pr_locs;
    if (ctx.preemptible) {
        for (const Segment& s : t.segments) {
            for (const std::string& nxt : fsm_successors(t, s.name)) {
                if (nxt != "end") {
                    pr_locs.insert(s.name);
                    break;
                }
            }
        }
    }
    for (const std::string& s : pr_locs) a.locations.push_back(Location{s + "_pr", {}, false, false});
    a.locations.push_back(Location{"end", {}, true, false});

    const std::string ins = ins_channel(ctx.core);
    const std::string rel = rel_channel(ctx.core, t.name);
    const std::string ter = ter_channel(ctx.core);
    const std::string pre = pre_channel(ctx.core);
    const std::string exe = exe_channel(ctx.core);
    const std::string q = queue_var(ctx.core);

    // Activation edges insert the task into the scheduler queue; the wait
    // invariant makes the handshake fire exactly at the period boundary.
    {
        Edge e;
        e.from = "start";
        e.to = "act";
        e.sync = SyncDir::Receive;
        e.channel = ins;
        e.updates.push_back(Update::queue_add(q, ctx.task_id, t.priority));
        a.edges.push_back(e);
    }
    {
        Edge e;
        e.from = "wait";
        e.to = "act";
        e.sync = SyncDir::Receive;
        e.channel = ins;
        e.clock_guard.push_back(ClockAtom{"x", "", CmpOp::Eq, t.period});
        e.resets = {"x"};
        e.updates.push_back(Update::queue_add(q, ctx.task_id, t.priority));
        a.edges.push_back(e);
    }
    // Release: one edge per job-entry segment.
    std::set<std::string> entry;
    for (const std::string& s : fsm_successors(t, "act")) {
        if (s == "end" || !entry.insert(s).second) continue;
        Edge e;
        e.from = "act";
        e.to = s;
        e.sync = SyncDir::Receive;
        e.channel = rel;
        e.resets = {"y"};
        a.edges.push_back(e);
    }
    // Segment exits: continue on exe (suppressed while a forced preemption is
    // pending), terminate silently, or be forced into the preemption location.
    for (const Segment& s : t.segments) {
        for (const std::string& nxt : fsm_successors(t, s.name)) {
            Edge e;
            e.from = s.name;
            e.clock_guard.push_back(ClockAtom{"y", "", CmpOp::Ge, s.bcet});
            if (nxt == "end") {
                e.to = "end";
            } else {
                e.to = nxt;
                e.sync = SyncDir::Emit;
                e.channel = exe;
                e.resets = {"y"};
            }
            a.edges.push_back(e);
        }
        if (pr_locs.count(s.name)) {
            Edge e;
            e.from = s.name;
            e.to = s.name + "_pr";
            e.sync = SyncDir::Receive;
            e.channel = pre;
            e.clock_guard.push_back(ClockAtom{"y", "", CmpOp::Ge, s.bcet});
            a.edges.push_back(e);
            // Resume into a successor segment chosen at release time.
            for (const std::string& nxt : fsm_successors(t, s.name)) {
                if (nxt == "end") continue;
                Edge re;
                re.from = s.name + "_pr";
                re.to = nxt;
                re.sync = SyncDir::Receive;
                re.channel = rel;
                re.resets = {"y"};
                a.edges.push_back(re);
            }
        }
    }
    // Termination: synchronize with the scheduler, then wait for the next
    // period. x keeps running, so x at end is the response time.
    {
        Edge e;
        e.from = "end";
        e.to = "wait";
        e.sync = SyncDir::Emit;
        e.channel = ter;
        a.edges.push_back(e);
    }
    return a;
}

TimedAutomaton generate_scheduler_ta(const std::string& core, const std::vector<Task>& partition) {
    std::set<std::int64_t> prios;
    for (const Task& t : partition)
        if (!prios.insert(t.priority).second)
            throw InputError("duplicate priorities within partition '" + core + "'");

    TimedAutomaton h;
    h.name = scheduler_automaton(core);
    h.locations.push_back(Location{"wait", {}, false, true});
    h.locations.push_back(Location{"insert", {}, true, false});
    h.locations.push_back(Location{"decide", {}, true, false});
    h.locations.push_back(Location{"release", {}, true, false});
    h.locations.push_back(Location{"preempt", {}, false, false});
    h.locations.push_back(Location{"update", {}, true, false});
    h.locations.push_back(Location{"release2", {}, true, false});

    const std::string ins = ins_channel(core);
    const std::string cmp = cmp_channel(core);
    const std::string ter = ter_channel(core);
    const std::string pre = pre_channel(core);
    const std::string q = queue_var(core);
    const std::string running = running_var(core);

    auto head_id = Term::queue(Term::Kind::QueueHeadId, q);
    auto head_pr = Term::queue(Term::Kind::QueueHeadPr, q);
    auto second_pr = Term::queue(Term::Kind::QueueSecondPr, q);
    auto qsize = Term::queue(Term::Kind::QueueSize, q);

    auto emit = [](const std::string& from, const std::string& to, const std::string& ch) {
        Edge e;
        e.from = from;
        e.to = to;
        e.sync = SyncDir::Emit;
        e.channel = ch;
        return e;
    };

    // Insertion: tasks activate by receiving ins; committed `insert` plus the
    // ins > cmp priority drain all simultaneous activations before sorting.
    h.edges.push_back(emit("wait", "insert", ins));
    h.edges.push_back(emit("insert", "insert", ins));
    // Activations arriving while a forced preemption is pending.
    h.edges.push_back(emit("preempt", "preempt", ins));

    // Sorting: the head is spared when it is already executing.
    {
        Edge e = emit("insert", "decide", cmp);
        e.discrete_guard.push_back(DiscreteAtom{Term::var(running), CmpOp::Eq, Term::lit(0)});
        e.updates.push_back(Update::queue_op(Update::Kind::QueueResort, q));
        h.edges.push_back(e);
    }
    {
        Edge e = emit("insert", "decide", cmp);
        e.discrete_guard.push_back(DiscreteAtom{Term::var(running), CmpOp::Eq, Term::lit(1)});
        e.updates.push_back(Update::queue_op(Update::Kind::QueueSortBehindHead, q));
        h.edges.push_back(e);
    }

    // decide: release a fresh head, keep running, or start a preemption.
    for (const Task& t : partition) {
        Edge e = emit("decide", "release", rel_channel(core, t.name));
        e.discrete_guard.push_back(DiscreteAtom{Term::var(running), CmpOp::Eq, Term::lit(0)});
        std::int64_t id = 0;
        for (std::size_t i = 0; i < partition.size(); ++i)
            if (partition[i].name == t.name) id = std::int64_t(i);
        e.discrete_guard.push_back(DiscreteAtom{head_id, CmpOp::Eq, Term::lit(id)});
        e.updates.push_back(Update::assign(running, Term::lit(1)));
        h.edges.push_back(e);
    }
    {
        Edge e;
        e.from = "release";
        e.to = "wait";
        h.edges.push_back(e);
    }
    {
        Edge e;
        e.from = "decide";
        e.to = "preempt";
        e.discrete_guard.push_back(DiscreteAtom{Term::var(running), CmpOp::Eq, Term::lit(1)});
        e.discrete_guard.push_back(DiscreteAtom{head_pr, CmpOp::Lt, second_pr});
        h.edges.push_back(e);
    }
    {
        Edge e;
        e.from = "decide";
        e.to = "wait";
        e.discrete_guard.push_back(DiscreteAtom{Term::var(running), CmpOp::Eq, Term::lit(1)});
        e.discrete_guard.push_back(DiscreteAtom{head_pr, CmpOp::Ge, second_pr});
        h.edges.push_back(e);
    }

    // Forced preemption at the victim's segment boundary; the queue is
    // re-sorted so the preempted task falls behind by static priority.
    {
        Edge e = emit("preempt", "release2", pre);
        e.updates.push_back(Update::queue_op(Update::Kind::QueueResort, q));
        h.edges.push_back(e);
    }
    // The victim may terminate instead of being preempted.
    {
        Edge e;
        e.from = "preempt";
        e.to = "release2";
        e.sync = SyncDir::Receive;
        e.channel = ter;
        e.updates.push_back(Update::queue_op(Update::Kind::QueueDequeue, q));
        e.updates.push_back(Update::queue_op(Update::Kind::QueueResort, q));
        h.edges.push_back(e);
    }
    for (std::size_t i = 0; i < partition.size(); ++i) {
        Edge e = emit("release2", "wait", rel_channel(core, partition[i].name));
        e.discrete_guard.push_back(DiscreteAtom{head_id, CmpOp::Eq, Term::lit(std::int64_t(i))});
        e.updates.push_back(Update::assign(running, Term::lit(1)));
        h.edges.push_back(e);
    }

    // Normal termination: dequeue, then release the new head if any.
    {
        Edge e;
        e.from = "wait";
        e.to = "update";
        e.sync = SyncDir::Receive;
        e.channel = ter;
        e.updates.push_back(Update::queue_op(Update::Kind::QueueDequeue, q));
        e.updates.push_back(Update::queue_op(Update::Kind::QueueResort, q));
        e.updates.push_back(Update::assign(running, Term::lit(0)));
        h.edges.push_back(e);
    }
    {
        Edge e;
        e.from = "update";
        e.to = "wait";
        e.discrete_guard.push_back(DiscreteAtom{qsize, CmpOp::Eq, Term::lit(0)});
        h.edges.push_back(e);
    }
    for (std::size_t i = 0; i < partition.size(); ++i) {
        Edge e = emit("update", "wait", rel_channel(core, partition[i].name));
        e.discrete_guard.push_back(DiscreteAtom{head_id, CmpOp::Eq, Term::lit(std::int64_t(i))});
        e.updates.push_back(Update::assign(running, Term::lit(1)));
        h.edges.push_back(e);
    }
    return h;
}

Network build_core_network(const RtsSpec& r, const std::string& core) {
    const std::vector<Task> partition = partition_of(r, core);
    if (partition.empty()) throw InputError("core '" + core + "' has no tasks");

    Network n;
    n.channels.push_back(Channel{ins_channel(core), ChannelKind::Handshake, 1, "ins_" + core + "_grp"});
    n.channels.push_back(Channel{cmp_channel(core), ChannelKind::Broadcast, 0, "ins_" + core + "_grp"});
    n.channels.push_back(Channel{ter_channel(core), ChannelKind::Handshake, 0, ""});
    n.channels.push_back(Channel{pre_channel(core), ChannelKind::Handshake, 1, "pre_" + core + "_grp"});
    n.channels.push_back(Channel{exe_channel(core), ChannelKind::Broadcast, 0, "pre_" + core + "_grp"});
    for (const Task& t : partition)
        n.channels.push_back(Channel{rel_channel(core, t.name), ChannelKind::Handshake, 0, ""});

    n.variables.push_back(VarDecl::queue(queue_var(core), std::int64_t(partition.size())));
    n.variables.push_back(VarDecl::scalar(running_var(core), 0, 1, 0));

    n.automata.push_back(generate_scheduler_ta(core, partition));
    const std::int64_t top = std::max_element(partition.begin(), partition.end(),
                                              [](const Task& a, const Task& b) {
                                                  return a.priority < b.priority;
                                              })
                                  ->priority;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        CoreContext ctx{core, std::int64_t(i), partition[i].priority < top};
        n.automata.push_back(generate_task_ta(partition[i], ctx));
    }
    return n;
}

WcrtReport check_schedulability(const RtsSpec& r, const std::string& core,
                                std::uint64_t state_budget) {
    const std::int64_t hp = hyperperiod(r, core);
    Network n = compose({build_core_network(r, core), ref_network(hp)});

    ExploreOptions opts;
    opts.state_budget = state_budget;
    opts.query_clock_cap = hp + 1;
    const std::vector<Task> partition = partition_of(r, core);
    for (const Task& t : partition) opts.query_clocks.push_back({task_automaton(t.name), "x"});

    ZoneGraph g = build_zone_graph(n, opts);
    WcrtReport report;
    report.stats = g.stats();
    report.schedulable = true;
    for (const Task& t : partition) {
        StateFormula at_end;
        at_end.locations.push_back({task_automaton(t.name), "end"});
        const auto sup = query_extremum(g, at_end, {task_automaton(t.name), "x"}, ExtremumMode::Sup);
        WcrtEntry entry;
        entry.task = t.name;
        entry.period = t.period;
        entry.wcrt = sup.satisfied ? sup.value : -1;
        entry.ok = sup.satisfied && sup.value <= t.period;
        if (!entry.ok) report.schedulable = false;
        report.tasks.push_back(entry);
    }
    return report;
}

// ── JSON ────────────────────────────────────────────────────────────────────

RtsSpec rts_from_json(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("rts.json: ") + e.what());
    }
    RtsSpec r;
    try {
        r.time_unit = root.value("time_unit", "tu");
        r.cores = root.at("cores").get<std::vector<std::string>>();
        for (const auto& jt : root.at("tasks")) {
            Task t;
            t.name = jt.at("name").get<std::string>();
            t.period = jt.at("period").get<std::int64_t>();
            t.priority = jt.at("priority").get<std::int64_t>();
            t.affinity = jt.at("affinity").get<std::string>();
            for (const auto& js : jt.at("segments")) {
                Segment s;
                s.name = js.at("name").get<std::string>();
                s.bcet = js.at("bcet").get<std::int64_t>();
                s.wcet = js.at("wcet").get<std::int64_t>();
                t.segments.push_back(s);
            }
            for (const auto& tr : jt.at("fsm").at("transitions")) {
                if (!tr.is_array() || tr.size() != 2)
                    throw InputError("fsm transition must be a [from, to] pair");
                t.fsm.transitions.emplace_back(tr[0].get<std::string>(), tr[1].get<std::string>());
            }
            r.tasks.push_back(std::move(t));
        }
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("rts.json: ") + e.what());
    }
    return r;
}

std::string rts_to_json(const RtsSpec& r) {
    ordered_json root;
    root["time_unit"] = r.time_unit;
    root["cores"] = r.cores;
    ordered_json tasks = ordered_json::array();
    for (const Task& t : r.tasks) {
        ordered_json jt;
        jt["name"] = t.name;
        jt["period"] = t.period;
        jt["priority"] = t.priority;
        jt["affinity"] = t.affinity;
        ordered_json segs = ordered_json::array();
        for (const Segment& s : t.segments) {
            ordered_json js;
            js["name"] = s.name;
            js["bcet"] = s.bcet;
            js["wcet"] = s.wcet;
            segs.push_back(js);
        }
        jt["segments"] = segs;
        ordered_json trs = ordered_json::array();
        for (const auto& [a, b] : t.fsm.transitions) trs.push_back(ordered_json::array({a, b}));
        jt["fsm"] = ordered_json{{"transitions", trs}};
        tasks.push_back(jt);
    }
    root["tasks"] = tasks;
    return root.dump(2) + "\n";
}

}  // namespace intercore
