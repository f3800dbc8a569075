#include "intercore/oracle.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>

#include "intercore/errors.hpp"

namespace intercore {

namespace {

// Name-resolved view built locally: this module must not share the symbolic
// engine's compiled representation.
struct ONet {
    struct Atom {
        std::uint32_t clock = 0;   // global index, 1-based
        std::uint32_t clock2 = 0;  // 0 when single-clock
        CmpOp op = CmpOp::Le;
        std::int64_t bound = 0;
    };
    struct OEdge {
        std::uint32_t from, to;
        std::vector<Atom> guard;
        std::vector<DiscreteAtom> discrete;  // names resolved at eval time
        SyncDir dir = SyncDir::Silent;
        std::int32_t channel = -1;
        std::vector<std::uint32_t> resets;
        const Edge* src = nullptr;
    };
    struct OLoc {
        bool committed = false;
        std::vector<Atom> invariant;
    };
    struct OAut {
        std::string name;
        std::uint32_t initial = 0;
        std::vector<OLoc> locations;
        std::vector<OEdge> edges;
        std::vector<std::vector<std::uint32_t>> out;
    };
    struct OChan {
        ChannelKind kind;
        int priority;
        std::string group;
        std::string name;
    };

    const Network* src = nullptr;
    std::vector<OAut> automata;
    std::vector<OChan> channels;
    std::uint32_t clock_count = 0;
    std::unordered_map<std::string, std::uint32_t> scalar_index;
    std::unordered_map<std::string, std::uint32_t> queue_index;
    std::vector<std::pair<std::int64_t, std::int64_t>> scalar_bounds;
    std::vector<std::int64_t> queue_caps;
    std::vector<std::int64_t> scalar_init;
};

ONet resolve(const Network& n) {
    auto diags = validate_network(n);
    if (!diags.empty())
        throw InputError("invalid network: " + diags.front().path + ": " + diags.front().message);

    ONet o;
    o.src = &n;
    std::unordered_map<std::string, std::int32_t> chan;
    for (const Channel& c : n.channels) {
        chan[c.name] = std::int32_t(o.channels.size());
        o.channels.push_back(ONet::OChan{c.kind, c.priority, c.group, c.name});
    }
    for (const VarDecl& v : n.variables) {
        if (v.kind == VarDecl::Kind::Int) {
            o.scalar_index[v.name] = std::uint32_t(o.scalar_bounds.size());
            o.scalar_bounds.emplace_back(v.min, v.max);
            o.scalar_init.push_back(v.init);
        } else {
            o.queue_index[v.name] = std::uint32_t(o.queue_caps.size());
            o.queue_caps.push_back(v.capacity);
        }
    }
    std::uint32_t next_clock = 1;
    for (const TimedAutomaton& a : n.automata) {
        std::unordered_map<std::string, std::uint32_t> clocks;
        for (const std::string& c : a.clocks) clocks[c] = next_clock++;
        std::unordered_map<std::string, std::uint32_t> locs;
        for (std::uint32_t i = 0; i < a.locations.size(); ++i) locs[a.locations[i].name] = i;

        ONet::OAut oa;
        oa.name = a.name;
        auto atoms_of = [&](const std::vector<ClockAtom>& in) {
            std::vector<ONet::Atom> out;
            for (const ClockAtom& at : in) {
                if (at.op == CmpOp::Lt || at.op == CmpOp::Gt || at.op == CmpOp::Ne)
                    throw ModelError("open constraint in '" + a.name +
                                     "': unit-delay digitization requires closed constraints");
                out.push_back(ONet::Atom{clocks.at(at.clock),
                                         at.minus_clock.empty() ? 0u : clocks.at(at.minus_clock),
                                         at.op, at.bound});
            }
            return out;
        };
        for (const Location& l : a.locations) {
            if (l.initial) oa.initial = locs[l.name];
            oa.locations.push_back(ONet::OLoc{l.committed, atoms_of(l.invariant)});
        }
        oa.out.resize(a.locations.size());
        for (const Edge& e : a.edges) {
            ONet::OEdge oe;
            oe.from = locs.at(e.from);
            oe.to = locs.at(e.to);
            oe.guard = atoms_of(e.clock_guard);
            oe.discrete = e.discrete_guard;
            oe.dir = e.sync;
            oe.channel = e.sync == SyncDir::Silent ? -1 : chan.at(e.channel);
            for (const std::string& r : e.resets) oe.resets.push_back(clocks.at(r));
            oe.src = &e;
            oa.out[oe.from].push_back(std::uint32_t(oa.edges.size()));
            oa.edges.push_back(std::move(oe));
        }
        o.automata.push_back(std::move(oa));
    }
    o.clock_count = next_clock - 1;
    return o;
}

using Node = DigitizedGraph::Node;

std::int64_t term_value(const ONet& o, const Term& t, const DiscreteState& d) {
    switch (t.kind) {
        case Term::Kind::Literal: return t.literal;
        case Term::Kind::Var: return d.scalars[o.scalar_index.at(t.name)];
        case Term::Kind::QueueHeadId: {
            const auto& q = d.queues[o.queue_index.at(t.name)];
            return q.empty() ? kNoTaskId : q.front().id;
        }
        case Term::Kind::QueueHeadPr: {
            const auto& q = d.queues[o.queue_index.at(t.name)];
            return q.empty() ? kNoPriority : q.front().pr;
        }
        case Term::Kind::QueueSecondPr: {
            const auto& q = d.queues[o.queue_index.at(t.name)];
            return q.size() < 2 ? kNoPriority : q[1].pr;
        }
        case Term::Kind::QueueSize: return std::int64_t(d.queues[o.queue_index.at(t.name)].size());
    }
    return 0;
}

bool cmp_holds(std::int64_t a, CmpOp op, std::int64_t b) {
    switch (op) {
        case CmpOp::Eq: return a == b;
        case CmpOp::Ne: return a != b;
        case CmpOp::Lt: return a < b;
        case CmpOp::Le: return a <= b;
        case CmpOp::Gt: return a > b;
        case CmpOp::Ge: return a >= b;
    }
    return false;
}

bool guard_holds(const ONet& o, const ONet::OEdge& e, const Node& s) {
    for (const ONet::Atom& at : e.guard) {
        const std::int64_t v = s.clocks[at.clock - 1] - (at.clock2 ? s.clocks[at.clock2 - 1] : 0);
        if (!cmp_holds(v, at.op, at.bound)) return false;
    }
    for (const DiscreteAtom& at : e.discrete) {
        if (!cmp_holds(term_value(o, at.lhs, s.discrete), at.op, term_value(o, at.rhs, s.discrete)))
            return false;
    }
    return true;
}

bool invariants_hold(const ONet& o, const Node& s) {
    for (std::uint32_t a = 0; a < o.automata.size(); ++a) {
        for (const ONet::Atom& at : o.automata[a].locations[s.locations[a]].invariant) {
            const std::int64_t v =
                s.clocks[at.clock - 1] - (at.clock2 ? s.clocks[at.clock2 - 1] : 0);
            if (!cmp_holds(v, at.op, at.bound)) return false;
        }
    }
    return true;
}

void apply_updates(const ONet& o, const ONet::OEdge& e, DiscreteState& d) {
    for (const Update& u : e.src->updates) {
        switch (u.kind) {
            case Update::Kind::Assign: {
                const std::uint32_t idx = o.scalar_index.at(u.target);
                const std::int64_t v = term_value(o, u.value, d);
                if (v < o.scalar_bounds[idx].first || v > o.scalar_bounds[idx].second)
                    throw ModelError("oracle: assignment out of bounds for " + u.target);
                d.scalars[idx] = v;
                break;
            }
            case Update::Kind::QueueAdd: {
                auto& q = d.queues[o.queue_index.at(u.target)];
                if (std::int64_t(q.size()) >= o.queue_caps[o.queue_index.at(u.target)])
                    throw ModelError("oracle: queue overflow in " + u.target);
                q.push_back(QueueRec{u.id, u.pr});
                break;
            }
            case Update::Kind::QueueDequeue: {
                auto& q = d.queues[o.queue_index.at(u.target)];
                if (q.empty()) throw ModelError("oracle: dequeue on empty " + u.target);
                q.erase(q.begin());
                break;
            }
            case Update::Kind::QueueResort: {
                auto& q = d.queues[o.queue_index.at(u.target)];
                std::stable_sort(q.begin(), q.end(),
                                 [](const QueueRec& x, const QueueRec& y) { return x.pr > y.pr; });
                break;
            }
            case Update::Kind::QueueSortBehindHead: {
                auto& q = d.queues[o.queue_index.at(u.target)];
                if (q.size() > 2)
                    std::stable_sort(q.begin() + 1, q.end(), [](const QueueRec& x, const QueueRec& y) {
                        return x.pr > y.pr;
                    });
                break;
            }
        }
    }
}

struct OCand {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // emitter first
    std::int32_t channel = -1;
};

std::vector<OCand> action_candidates(const ONet& o, const Node& s) {
    bool committed = false;
    for (std::uint32_t a = 0; a < o.automata.size(); ++a)
        if (o.automata[a].locations[s.locations[a]].committed) committed = true;
    auto committed_ok = [&](const OCand& c) {
        if (!committed) return true;
        for (const auto& [a, ei] : c.edges)
            if (o.automata[a].locations[o.automata[a].edges[ei].from].committed) return true;
        return false;
    };

    std::vector<OCand> cands;
    for (std::uint32_t a = 0; a < o.automata.size(); ++a) {
        const auto& oa = o.automata[a];
        for (std::uint32_t ei : oa.out[s.locations[a]]) {
            const auto& e = oa.edges[ei];
            if (e.dir == SyncDir::Receive) continue;
            if (!guard_holds(o, e, s)) continue;
            if (e.dir == SyncDir::Silent) {
                OCand c;
                c.edges.emplace_back(a, ei);
                if (committed_ok(c)) cands.push_back(std::move(c));
                continue;
            }
            if (o.channels[e.channel].kind == ChannelKind::Handshake) {
                for (std::uint32_t b = 0; b < o.automata.size(); ++b) {
                    if (b == a) continue;
                    for (std::uint32_t fi : o.automata[b].out[s.locations[b]]) {
                        const auto& f = o.automata[b].edges[fi];
                        if (f.dir != SyncDir::Receive || f.channel != e.channel) continue;
                        if (!guard_holds(o, f, s)) continue;
                        OCand c;
                        c.channel = e.channel;
                        c.edges.emplace_back(a, ei);
                        c.edges.emplace_back(b, fi);
                        if (committed_ok(c)) cands.push_back(std::move(c));
                    }
                }
            } else {
                std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> recv;
                for (std::uint32_t b = 0; b < o.automata.size(); ++b) {
                    if (b == a) continue;
                    std::vector<std::uint32_t> opts;
                    for (std::uint32_t fi : o.automata[b].out[s.locations[b]]) {
                        const auto& f = o.automata[b].edges[fi];
                        if (f.dir == SyncDir::Receive && f.channel == e.channel &&
                            guard_holds(o, f, s))
                            opts.push_back(fi);
                    }
                    if (!opts.empty()) recv.emplace_back(b, std::move(opts));
                }
                std::vector<std::size_t> pick(recv.size(), 0);
                while (true) {
                    OCand c;
                    c.channel = e.channel;
                    c.edges.emplace_back(a, ei);
                    for (std::size_t k = 0; k < recv.size(); ++k)
                        c.edges.emplace_back(recv[k].first, recv[k].second[pick[k]]);
                    if (committed_ok(c)) cands.push_back(std::move(c));
                    std::size_t k = 0;
                    while (k < recv.size()) {
                        if (++pick[k] < recv[k].second.size()) break;
                        pick[k] = 0;
                        ++k;
                    }
                    if (k == recv.size()) break;
                }
            }
        }
    }

    // Channel priority within groups, evaluated pointwise at this valuation.
    std::vector<OCand> out;
    for (OCand& c : cands) {
        bool dominated = false;
        if (c.channel >= 0 && !o.channels[c.channel].group.empty()) {
            for (const OCand& other : cands) {
                if (other.channel < 0 || other.channel == c.channel) continue;
                if (o.channels[other.channel].group == o.channels[c.channel].group &&
                    o.channels[other.channel].priority > o.channels[c.channel].priority) {
                    dominated = true;
                    break;
                }
            }
        }
        if (!dominated) out.push_back(std::move(c));
    }
    return out;
}

std::uint64_t node_key(const Node& n) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    for (std::uint32_t l : n.locations) mix(l);
    mix(n.discrete.hash());
    for (std::int64_t c : n.clocks) mix(std::uint64_t(c));
    mix(std::uint64_t(n.time));
    return h;
}

bool node_eq(const Node& a, const Node& b) {
    return a.time == b.time && a.locations == b.locations && a.clocks == b.clocks &&
           a.discrete == b.discrete;
}

}  // namespace

bool DigitizedGraph::at(const Node& n, const std::string& automaton,
                        const std::string& location) const {
    const std::uint32_t a = automaton_index.at(automaton);
    return n.locations[a] == location_index[a].at(location);
}

std::int64_t DigitizedGraph::clock_value(const Node& n, const std::string& automaton,
                                         const std::string& clock) const {
    const std::uint32_t a = automaton_index.at(automaton);
    return n.clocks[clock_index[a].at(clock)];
}

DigitizedGraph digitized_explore(const Network& n, std::int64_t horizon,
                                 const DigitizedOptions& opts) {
    if (horizon < 1) throw InputError("oracle horizon must be at least 1");
    const ONet o = resolve(n);

    DigitizedGraph g;
    {
        std::uint32_t next_clock = 0;
        for (std::uint32_t a = 0; a < n.automata.size(); ++a) {
            g.automaton_index[n.automata[a].name] = a;
            std::map<std::string, std::uint32_t> locs;
            for (std::uint32_t i = 0; i < n.automata[a].locations.size(); ++i)
                locs[n.automata[a].locations[i].name] = i;
            g.location_index.push_back(std::move(locs));
            std::map<std::string, std::uint32_t> clocks;
            for (const std::string& c : n.automata[a].clocks) clocks[c] = next_clock++;
            g.clock_index.push_back(std::move(clocks));
        }
    }

    Node init;
    for (const auto& a : o.automata) init.locations.push_back(a.initial);
    init.discrete.scalars = o.scalar_init;
    init.discrete.queues.resize(o.queue_caps.size());
    init.clocks.assign(o.clock_count, 0);
    init.time = 0;
    if (!invariants_hold(o, init)) throw ModelError("oracle: initial state violates invariants");

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> seen;
    auto find_or_add = [&](Node&& node) -> std::pair<std::uint32_t, bool> {
        const std::uint64_t key = node_key(node);
        auto& bucket = seen[key];
        for (std::uint32_t idx : bucket)
            if (node_eq(g.nodes[idx], node)) return {idx, false};
        if (g.nodes.size() >= opts.state_budget)
            throw ResourceError("oracle state budget exceeded (" +
                                std::to_string(opts.state_budget) + ")");
        const std::uint32_t idx = std::uint32_t(g.nodes.size());
        bucket.push_back(idx);
        g.nodes.push_back(std::move(node));
        g.out.emplace_back();
        return {idx, true};
    };

    find_or_add(std::move(init));
    std::deque<std::uint32_t> waiting{0};
    while (!waiting.empty()) {
        const std::uint32_t idx = waiting.front();
        waiting.pop_front();
        const Node cur = g.nodes[idx];

        bool committed = false;
        for (std::uint32_t a = 0; a < o.automata.size(); ++a)
            if (o.automata[a].locations[cur.locations[a]].committed) committed = true;

        // Unit delay.
        if (!committed && cur.time + 1 <= horizon) {
            Node next = cur;
            for (std::int64_t& c : next.clocks) ++c;
            ++next.time;
            if (invariants_hold(o, next)) {
                auto [to, fresh] = find_or_add(std::move(next));
                g.arcs.push_back(DigitizedGraph::Arc{idx, to, true, ""});
                g.out[idx].push_back(std::uint32_t(g.arcs.size() - 1));
                if (fresh) waiting.push_back(to);
            }
        }

        // Actions.
        for (const OCand& c : action_candidates(o, cur)) {
            Node next = cur;
            bool ok = true;
            for (const auto& [a, ei] : c.edges) {
                const auto& e = o.automata[a].edges[ei];
                next.locations[a] = e.to;
                try {
                    apply_updates(o, e, next.discrete);
                } catch (const ModelError&) {
                    throw;
                }
                for (std::uint32_t r : e.resets) next.clocks[r - 1] = 0;
            }
            if (!invariants_hold(o, next)) ok = false;
            if (!ok) continue;
            std::string event;
            if (c.channel >= 0) event = o.channels[c.channel].name;
            auto [to, fresh] = find_or_add(std::move(next));
            g.arcs.push_back(DigitizedGraph::Arc{idx, to, false, event});
            g.out[idx].push_back(std::uint32_t(g.arcs.size() - 1));
            if (fresh) waiting.push_back(to);
        }
    }
    return g;
}

// ── Derived results ─────────────────────────────────────────────────────────

std::vector<std::int64_t> window_instants(const DigitizedGraph& g, const std::string& automaton,
                                          const std::string& location, std::int64_t lb,
                                          std::int64_t rb) {
    std::set<std::int64_t> inst;
    const std::uint32_t a = g.automaton_index.at(automaton);
    const std::uint32_t loc = g.location_index[a].at(location);
    const std::uint32_t y = g.clock_index[a].at("y");
    for (const auto& n : g.nodes) {
        if (n.locations[a] != loc) continue;
        if (n.clocks[y] < lb || n.clocks[y] > rb) continue;
        inst.insert(n.time);
    }
    return {inst.begin(), inst.end()};
}

std::vector<std::int64_t> emission_instants(const DigitizedGraph& g, const std::string& event) {
    std::set<std::int64_t> inst;
    for (const auto& arc : g.arcs)
        if (arc.event == event) inst.insert(g.nodes[arc.from].time);
    return {inst.begin(), inst.end()};
}

std::set<std::pair<std::int64_t, std::int64_t>> window_pairs(
    const DigitizedGraph& g, const std::string& automaton, const std::string& location,
    std::int64_t lb1, std::int64_t rb1, std::int64_t lb2, std::int64_t rb2) {
    std::set<std::pair<std::int64_t, std::int64_t>> pairs;
    const std::uint32_t a = g.automaton_index.at(automaton);
    const std::uint32_t loc = g.location_index[a].at(location);
    const std::uint32_t y = g.clock_index[a].at("y");
    // From every in-window-1 node, walk forward while the automaton stays put.
    for (std::uint32_t start = 0; start < g.nodes.size(); ++start) {
        const auto& sn = g.nodes[start];
        if (sn.locations[a] != loc) continue;
        if (sn.clocks[y] < lb1 || sn.clocks[y] > rb1) continue;
        std::set<std::uint32_t> visited{start};
        std::vector<std::uint32_t> work{start};
        while (!work.empty()) {
            const std::uint32_t v = work.back();
            work.pop_back();
            const auto& n = g.nodes[v];
            if (n.clocks[y] >= lb2 && n.clocks[y] <= rb2 && n.clocks[y] >= sn.clocks[y])
                pairs.emplace(sn.time, n.time);
            for (std::uint32_t ai : g.out[v]) {
                const auto& arc = g.arcs[ai];
                if (g.nodes[arc.to].locations[a] != loc) continue;  // segment exited
                if (visited.insert(arc.to).second) work.push_back(arc.to);
            }
        }
    }
    return pairs;
}

std::set<std::pair<std::int64_t, std::int64_t>> emission_pairs(const DigitizedGraph& g,
                                                               const std::string& first,
                                                               const std::string& second) {
    std::set<std::pair<std::int64_t, std::int64_t>> pairs;
    for (std::uint32_t ai = 0; ai < g.arcs.size(); ++ai) {
        if (g.arcs[ai].event != first) continue;
        const std::int64_t t1 = g.nodes[g.arcs[ai].from].time;
        std::set<std::uint32_t> visited;
        std::vector<std::uint32_t> work{g.arcs[ai].to};
        while (!work.empty()) {
            const std::uint32_t v = work.back();
            work.pop_back();
            if (!visited.insert(v).second) continue;
            for (std::uint32_t bi : g.out[v]) {
                const auto& arc = g.arcs[bi];
                if (arc.event == first) continue;  // a new occurrence supersedes
                if (arc.event == second) {
                    pairs.emplace(t1, g.nodes[arc.from].time);
                    continue;
                }
                work.push_back(arc.to);
            }
        }
    }
    return pairs;
}

IvTable oracle_intervals(const Network& core_network, const RtsSpec& r, const EventSpec& e,
                         const std::string& core, std::int64_t horizon,
                         const DigitizedOptions& opts) {
    const Task* tau = producing_task(r, e, core);
    if (!tau) throw InputError("core '" + core + "' does not have a unique producing task");
    const std::int64_t hp = hyperperiod(r, core);
    const DigitizedGraph g = digitized_explore(core_network, horizon, opts);

    IvTable table;
    table.core = core;
    table.hyperperiod = hp;
    for (const Producer* p : task_producers(e, tau->name)) {
        SegmentIntervals si;
        si.task = tau->name;
        si.segment = p->segment;
        si.first_event = p->emits.front().event;
        si.period = tau->period;
        si.periods = hp / tau->period;
        const auto instants = window_instants(g, task_automaton(tau->name), p->segment,
                                              p->emits.front().lb, p->emits.front().rb);
        // Maximal runs of consecutive integers, capped at the hyperperiod.
        for (std::size_t i = 0; i < instants.size();) {
            std::size_t j = i;
            while (j + 1 < instants.size() && instants[j + 1] == instants[j] + 1) ++j;
            if (instants[i] <= hp) si.global.add(instants[i], std::min(instants[j], hp));
            i = j + 1;
        }
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
        table.segments.push_back(std::move(si));
    }
    return table;
}

std::map<std::string, std::int64_t> oracle_wcrt(const RtsSpec& r, const std::string& core,
                                                std::int64_t horizon,
                                                const DigitizedOptions& opts) {
    const Network n = build_core_network(r, core);
    const DigitizedGraph g = digitized_explore(n, horizon, opts);
    std::map<std::string, std::int64_t> out;
    for (const Task& t : partition_of(r, core)) {
        const std::uint32_t a = g.automaton_index.at(task_automaton(t.name));
        const std::uint32_t end = g.location_index[a].at("end");
        const std::uint32_t x = g.clock_index[a].at("x");
        std::int64_t best = -1;
        for (const auto& node : g.nodes)
            if (node.locations[a] == end) best = std::max(best, node.clocks[x]);
        out[t.name] = best;
    }
    return out;
}

// ── Chain bounds over the digitized graph ───────────────────────────────────

namespace {

// Observer-product latency analysis. States of the tracker: W1 (awaiting the
// chain start), R1 (measuring, awaiting r), W2 (awaiting the closing event).
// For simple-max the two-phase tracker degenerates to R1 -> completion.
struct ChainDp {
    const DigitizedGraph& g;
    const Requirement& req;
    bool maximize;

    static constexpr std::int64_t kBottom = INT64_MIN / 2;
    static constexpr std::int64_t kTop = INT64_MAX / 2;

    // memo[state][node]: extremal remaining time to completion, states R1, W2.
    std::vector<std::vector<std::int64_t>> memo;
    std::vector<std::vector<char>> mark;  // 0 fresh, 1 on stack, 2 done

    explicit ChainDp(const DigitizedGraph& graph, const Requirement& r, bool max)
        : g(graph), req(r), maximize(max) {
        memo.assign(2, std::vector<std::int64_t>(g.nodes.size(), 0));
        mark.assign(2, std::vector<char>(g.nodes.size(), 0));
    }

    std::int64_t dead() const { return maximize ? kBottom : kTop; }
    std::int64_t better(std::int64_t a, std::int64_t b) const {
        return maximize ? std::max(a, b) : std::min(a, b);
    }

    // phase 0 = awaiting r (measuring), phase 1 = awaiting the closing event.
    std::int64_t remaining(int phase, std::uint32_t node) {
        if (mark[phase][node] == 1) return dead();  // zero-time cycle
        if (mark[phase][node] == 2) return memo[phase][node];
        mark[phase][node] = 1;
        std::int64_t best = dead();
        for (std::uint32_t ai : g.out[node]) {
            const auto& arc = g.arcs[ai];
            const std::int64_t cost = arc.delay ? 1 : 0;
            std::int64_t cand = dead();
            if (req.kind == RequirementKind::SimpleMax) {
                // Single phase: complete on the closing event.
                if (arc.event == req.events[1]) {
                    cand = cost;
                } else {
                    cand = saturating_add(cost, remaining(phase, arc.to));
                }
            } else if (phase == 0) {
                if (arc.event == req.events[1]) {
                    cand = saturating_add(cost, remaining(1, arc.to));
                } else if (arc.event == req.events[0] &&
                           req.kind == RequirementKind::LastToFirst) {
                    // The measurement restarts at the later start event.
                    cand = dead();
                } else {
                    cand = saturating_add(cost, remaining(0, arc.to));
                }
            } else {
                if (arc.event == req.events[2]) {
                    cand = cost;
                } else {
                    // Start events here are either ignored (this chain keeps
                    // measuring) or adopted (counted as their own start).
                    cand = saturating_add(cost, remaining(1, arc.to));
                }
            }
            best = better(best, cand);
        }
        mark[phase][node] = 2;
        memo[phase][node] = best;
        return best;
    }

    std::int64_t saturating_add(std::int64_t a, std::int64_t b) const {
        if (b == kBottom || b == kTop) return b;
        return a + b;
    }
};

}  // namespace

namespace {

// Tracker-state reachability: a start event opens a measured chain only where
// the tracker can actually be receptive (initial, after a completion, as an
// adoption while awaiting the closing event, or as a last-start restart).
enum ObsState : int { kAwaitStart = 0, kAwaitMid = 1, kAwaitClose = 2 };

std::vector<std::array<bool, 3>> reachable_tracker_states(const DigitizedGraph& g,
                                                          const Requirement& req) {
    std::vector<std::array<bool, 3>> reach(g.nodes.size(), {false, false, false});
    std::vector<std::pair<std::uint32_t, int>> work;
    auto push = [&](std::uint32_t node, int obs) {
        if (!reach[node][std::size_t(obs)]) {
            reach[node][std::size_t(obs)] = true;
            work.emplace_back(node, obs);
        }
    };
    push(0, kAwaitStart);
    const bool simple = req.kind == RequirementKind::SimpleMax;
    const std::string& start_ev = req.events[0];
    const std::string& mid_ev = simple ? req.events[1] : req.events[1];
    const std::string& close_ev = simple ? req.events[1] : req.events[2];
    while (!work.empty()) {
        auto [node, obs] = work.back();
        work.pop_back();
        for (std::uint32_t ai : g.out[node]) {
            const auto& arc = g.arcs[ai];
            const std::string& ev = arc.event;
            switch (obs) {
                case kAwaitStart:
                    push(arc.to, ev == start_ev ? kAwaitMid : kAwaitStart);
                    break;
                case kAwaitMid:
                    if (simple) {
                        push(arc.to, ev == close_ev ? kAwaitStart : kAwaitMid);
                    } else if (ev == mid_ev) {
                        push(arc.to, kAwaitClose);
                    } else {
                        // start events are ignored (ff) or restart (lf):
                        // either way the tracker keeps awaiting the middle
                        // event.
                        push(arc.to, kAwaitMid);
                    }
                    break;
                case kAwaitClose:
                    if (ev == close_ev) {
                        push(arc.to, kAwaitStart);
                    } else if (ev == start_ev) {
                        push(arc.to, kAwaitClose);  // ignore
                        push(arc.to, kAwaitMid);    // adopt as new chain start
                    } else {
                        push(arc.to, kAwaitClose);
                    }
                    break;
            }
        }
    }
    return reach;
}

}  // namespace

OracleBoundResult oracle_bound(const Network& network_with_events, const Requirement& req,
                               std::int64_t horizon, const DigitizedOptions& opts) {
    const DigitizedGraph g = digitized_explore(network_with_events, horizon, opts);
    const bool maximize = req.mode == BoundMode::Max;
    ChainDp dp(g, req, maximize);
    const auto reach = reachable_tracker_states(g, req);

    OracleBoundResult out;
    std::int64_t best = dp.dead();
    for (const auto& arc : g.arcs) {
        if (arc.event != req.events[0]) continue;
        bool can_start = reach[arc.from][kAwaitStart];
        if (req.kind != RequirementKind::SimpleMax && reach[arc.from][kAwaitClose])
            can_start = true;  // adoption while awaiting the closing event
        if (req.kind == RequirementKind::LastToFirst && reach[arc.from][kAwaitMid])
            can_start = true;  // measurement restarts at the last start event
        if (!can_start) continue;
        const std::int64_t v = dp.remaining(0, arc.to);
        best = dp.better(best, v);
    }
    if (best == ChainDp::kBottom || best == ChainDp::kTop) return out;
    out.satisfied = true;
    out.value = best;
    return out;
}

}  // namespace intercore
