#include "intercore/explorer.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <sstream>
#include <stdexcept>

#include "intercore/errors.hpp"

namespace intercore {

std::size_t DiscreteState::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ULL;
    };
    for (std::int64_t v : scalars) mix(static_cast<std::uint64_t>(v));
    for (const auto& q : queues) {
        mix(0x9e3779b97f4a7c15ULL);
        for (const QueueRec& r : q) {
            mix(static_cast<std::uint64_t>(r.id));
            mix(static_cast<std::uint64_t>(r.pr));
        }
    }
    return static_cast<std::size_t>(h);
}

// ── Compiled network ────────────────────────────────────────────────────────
// Name-resolved, index-based view of a validated Network, built once per
// exploration. Guards and invariants become DBM constraints over global
// clock indices; discrete expressions become index-addressed terms.

class CompiledNetwork {
public:
    struct CTerm {
        Term::Kind kind = Term::Kind::Literal;
        std::int64_t literal = 0;
        std::uint32_t index = 0;  // scalar or queue index
    };
    struct CDiscreteAtom {
        CTerm lhs;
        CmpOp op;
        CTerm rhs;
    };
    struct CUpdate {
        Update::Kind kind;
        std::uint32_t index = 0;
        CTerm value;
        std::int64_t id = 0, pr = 0;
    };
    struct CEdge {
        std::uint32_t from = 0, to = 0;
        std::vector<ClockConstraint> guard;
        std::vector<CDiscreteAtom> discrete;
        std::int32_t channel = -1;
        SyncDir dir = SyncDir::Silent;
        std::vector<ClockIndex> resets;
        std::vector<CUpdate> updates;
    };
    struct CLocation {
        std::string name;
        bool committed = false;
        std::vector<ClockConstraint> invariant;
    };
    struct CAutomaton {
        std::string name;
        std::uint32_t clock_base = 1;
        std::uint32_t clock_count = 0;
        std::uint32_t initial = 0;
        std::vector<CLocation> locations;
        std::vector<CEdge> edges;
        std::vector<std::vector<std::uint32_t>> out;  // edge indices per location
        std::unordered_map<std::string, std::uint32_t> loc_index;
        std::vector<std::pair<std::string, ClockIndex>> clock_names;  // declaration order
        std::unordered_map<std::string, ClockIndex> clock_global;
    };
    struct CChannel {
        ChannelKind kind;
        int priority = 0;
        std::int32_t group = -1;
        std::string name;
    };
    struct CVar {
        std::int64_t min, max, init;
    };

    Network source;
    std::vector<CAutomaton> automata;
    std::vector<CChannel> channels;
    std::vector<CVar> scalars;
    std::vector<std::int64_t> queue_caps;
    std::unordered_map<std::string, std::uint32_t> automaton_index;
    std::unordered_map<std::string, std::uint32_t> channel_index;
    std::unordered_map<std::string, std::uint32_t> scalar_index;
    std::unordered_map<std::string, std::uint32_t> queue_index;
    std::uint32_t clock_total = 0;
    std::vector<std::int64_t> max_const;  // per global clock; [0] unused

    explicit CompiledNetwork(const Network& n);

    CTerm resolve_term(const Term& t) const;
    ClockIndex resolve_clock(const ClockRef& r) const;
    DiscreteState initial_discrete() const;
    std::string edge_name(std::uint32_t a, const CEdge& e) const {
        return automata[a].name + "." + automata[a].locations[e.from].name + "->" +
               automata[a].locations[e.to].name;
    }
};

namespace {

// Expands one syntactic atom into DBM constraints over global clock indices;
// y == kRefClock for single-clock atoms.
void append_constraints(std::vector<ClockConstraint>& out, ClockIndex x, ClockIndex y, CmpOp op,
                        std::int64_t bound) {
    switch (op) {
        case CmpOp::Le: out.push_back({x, y, Bound::le(bound)}); break;
        case CmpOp::Lt: out.push_back({x, y, Bound::lt(bound)}); break;
        case CmpOp::Ge: out.push_back({y, x, Bound::le(-bound)}); break;
        case CmpOp::Gt: out.push_back({y, x, Bound::lt(-bound)}); break;
        case CmpOp::Eq:
            out.push_back({x, y, Bound::le(bound)});
            out.push_back({y, x, Bound::le(-bound)});
            break;
        case CmpOp::Ne: throw InputError("!= is not a convex clock constraint");
    }
}

}  // namespace

CompiledNetwork::CompiledNetwork(const Network& n) : source(n) {
    auto diags = validate_network(n);
    if (!diags.empty()) {
        std::ostringstream os;
        os << "invalid network: " << diags.front().path << ": " << diags.front().message;
        if (diags.size() > 1) os << " (+" << diags.size() - 1 << " more)";
        throw InputError(os.str());
    }

    for (std::uint32_t i = 0; i < n.channels.size(); ++i) {
        channel_index[n.channels[i].name] = i;
        channels.push_back(
            CChannel{n.channels[i].kind, n.channels[i].priority, -1, n.channels[i].name});
    }
    std::unordered_map<std::string, std::int32_t> groups;
    for (std::uint32_t i = 0; i < n.channels.size(); ++i) {
        const std::string& g = n.channels[i].group;
        if (g.empty()) continue;
        auto [it, fresh] = groups.emplace(g, std::int32_t(groups.size()));
        channels[i].group = it->second;
    }

    for (const VarDecl& v : n.variables) {
        if (v.kind == VarDecl::Kind::Int) {
            scalar_index[v.name] = std::uint32_t(scalars.size());
            scalars.push_back(CVar{v.min, v.max, v.init});
        } else {
            queue_index[v.name] = std::uint32_t(queue_caps.size());
            queue_caps.push_back(v.capacity);
        }
    }

    ClockIndex next_clock = 1;
    for (const TimedAutomaton& a : n.automata) {
        automaton_index[a.name] = std::uint32_t(automata.size());
        CAutomaton ca;
        ca.name = a.name;
        ca.clock_base = next_clock;
        ca.clock_count = std::uint32_t(a.clocks.size());
        for (const std::string& c : a.clocks) {
            ca.clock_names.emplace_back(c, next_clock);
            ca.clock_global[c] = next_clock++;
        }
        for (std::uint32_t li = 0; li < a.locations.size(); ++li) {
            ca.loc_index[a.locations[li].name] = li;
            if (a.locations[li].initial) ca.initial = li;
        }
        automata.push_back(std::move(ca));
    }
    clock_total = next_clock - 1;
    max_const.assign(clock_total + 1, 0);

    auto note_const = [this](ClockIndex x, std::int64_t bound) {
        max_const[x] = std::max(max_const[x], bound < 0 ? -bound : bound);
    };

    for (std::uint32_t ai = 0; ai < n.automata.size(); ++ai) {
        const TimedAutomaton& a = n.automata[ai];
        CAutomaton& ca = automata[ai];
        auto resolve_atoms = [&](const std::vector<ClockAtom>& atoms) {
            std::vector<ClockConstraint> out;
            for (const ClockAtom& at : atoms) {
                const ClockIndex x = ca.clock_global.at(at.clock);
                const ClockIndex y =
                    at.minus_clock.empty() ? kRefClock : ca.clock_global.at(at.minus_clock);
                append_constraints(out, x, y, at.op, at.bound);
                note_const(x, at.bound);
                if (y != kRefClock) note_const(y, at.bound);
            }
            return out;
        };
        for (const Location& l : a.locations) {
            CLocation cl;
            cl.name = l.name;
            cl.committed = l.committed;
            cl.invariant = resolve_atoms(l.invariant);
            ca.locations.push_back(std::move(cl));
        }
        ca.out.resize(ca.locations.size());
        for (const Edge& e : a.edges) {
            CEdge ce;
            ce.from = ca.loc_index.at(e.from);
            ce.to = ca.loc_index.at(e.to);
            ce.guard = resolve_atoms(e.clock_guard);
            for (const DiscreteAtom& d : e.discrete_guard)
                ce.discrete.push_back(CDiscreteAtom{resolve_term(d.lhs), d.op, resolve_term(d.rhs)});
            if (e.sync != SyncDir::Silent) {
                ce.channel = std::int32_t(channel_index.at(e.channel));
                ce.dir = e.sync;
            }
            for (const std::string& r : e.resets) ce.resets.push_back(ca.clock_global.at(r));
            for (const Update& u : e.updates) {
                CUpdate cu;
                cu.kind = u.kind;
                if (u.kind == Update::Kind::Assign) {
                    cu.index = scalar_index.at(u.target);
                    cu.value = resolve_term(u.value);
                } else {
                    cu.index = queue_index.at(u.target);
                    cu.id = u.id;
                    cu.pr = u.pr;
                }
                ce.updates.push_back(cu);
            }
            ca.out[ce.from].push_back(std::uint32_t(ca.edges.size()));
            ca.edges.push_back(std::move(ce));
        }
    }
}

CompiledNetwork::CTerm CompiledNetwork::resolve_term(const Term& t) const {
    CTerm c;
    c.kind = t.kind;
    c.literal = t.literal;
    switch (t.kind) {
        case Term::Kind::Literal: break;
        case Term::Kind::Var: c.index = scalar_index.at(t.name); break;
        default: c.index = queue_index.at(t.name); break;
    }
    return c;
}

ClockIndex CompiledNetwork::resolve_clock(const ClockRef& r) const {
    auto it = automaton_index.find(r.automaton);
    if (it == automaton_index.end()) throw InputError("unknown automaton: " + r.automaton);
    const CAutomaton& a = automata[it->second];
    auto ct = a.clock_global.find(r.clock);
    if (ct == a.clock_global.end()) throw InputError("unknown clock " + r.automaton + "." + r.clock);
    return ct->second;
}

DiscreteState CompiledNetwork::initial_discrete() const {
    DiscreteState d;
    d.scalars.reserve(scalars.size());
    for (const CVar& v : scalars) d.scalars.push_back(v.init);
    d.queues.resize(queue_caps.size());
    return d;
}

// ── Semantics ───────────────────────────────────────────────────────────────

namespace {

using CEdge = CompiledNetwork::CEdge;
using CTerm = CompiledNetwork::CTerm;

std::int64_t eval_term(const CTerm& t, const DiscreteState& d) {
    switch (t.kind) {
        case Term::Kind::Literal: return t.literal;
        case Term::Kind::Var: return d.scalars[t.index];
        case Term::Kind::QueueHeadId: {
            const auto& q = d.queues[t.index];
            return q.empty() ? kNoTaskId : q.front().id;
        }
        case Term::Kind::QueueHeadPr: {
            const auto& q = d.queues[t.index];
            return q.empty() ? kNoPriority : q.front().pr;
        }
        case Term::Kind::QueueSecondPr: {
            const auto& q = d.queues[t.index];
            return q.size() < 2 ? kNoPriority : q[1].pr;
        }
        case Term::Kind::QueueSize: return std::int64_t(d.queues[t.index].size());
    }
    return 0;
}

bool eval_cmp(std::int64_t a, CmpOp op, std::int64_t b) {
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

bool discrete_enabled(const CEdge& e, const DiscreteState& d) {
    for (const auto& atom : e.discrete)
        if (!eval_cmp(eval_term(atom.lhs, d), atom.op, eval_term(atom.rhs, d))) return false;
    return true;
}

// One candidate transition: participating edges, emitter first, then
// receivers in automaton order.
struct Cand {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (automaton, edge index)
    std::int32_t channel = -1;
};

void apply_update(const CompiledNetwork& cn, std::uint32_t a, const CEdge& e,
                  const CompiledNetwork::CUpdate& u, DiscreteState& d) {
    switch (u.kind) {
        case Update::Kind::Assign: {
            const std::int64_t v = eval_term(u.value, d);
            const auto& decl = cn.scalars[u.index];
            if (v < decl.min || v > decl.max)
                throw ModelError("variable assignment out of bounds on edge " + cn.edge_name(a, e));
            d.scalars[u.index] = v;
            break;
        }
        case Update::Kind::QueueAdd: {
            auto& q = d.queues[u.index];
            if (std::int64_t(q.size()) >= cn.queue_caps[u.index])
                throw ModelError("queue overflow on edge " + cn.edge_name(a, e));
            q.push_back(QueueRec{u.id, u.pr});
            break;
        }
        case Update::Kind::QueueDequeue: {
            auto& q = d.queues[u.index];
            if (q.empty()) throw ModelError("dequeue on empty queue on edge " + cn.edge_name(a, e));
            q.erase(q.begin());
            break;
        }
        case Update::Kind::QueueResort: {
            auto& q = d.queues[u.index];
            std::stable_sort(q.begin(), q.end(),
                             [](const QueueRec& x, const QueueRec& y) { return x.pr > y.pr; });
            break;
        }
        case Update::Kind::QueueSortBehindHead: {
            auto& q = d.queues[u.index];
            if (q.size() > 2)
                std::stable_sort(q.begin() + 1, q.end(),
                                 [](const QueueRec& x, const QueueRec& y) { return x.pr > y.pr; });
            break;
        }
    }
}

std::vector<ClockConstraint> invariants_at(const CompiledNetwork& cn,
                                           const std::vector<std::uint32_t>& locs) {
    std::vector<ClockConstraint> out;
    for (std::uint32_t a = 0; a < cn.automata.size(); ++a) {
        const auto& inv = cn.automata[a].locations[locs[a]].invariant;
        out.insert(out.end(), inv.begin(), inv.end());
    }
    return out;
}

bool any_committed(const CompiledNetwork& cn, const std::vector<std::uint32_t>& locs) {
    for (std::uint32_t a = 0; a < cn.automata.size(); ++a)
        if (cn.automata[a].locations[locs[a]].committed) return true;
    return false;
}

// Candidate transitions in deterministic order, applying the committed
// restriction and discrete guards. Zone-level enabledness comes later.
std::vector<Cand> enumerate_candidates(const CompiledNetwork& cn, const SymbolicState& s) {
    std::vector<Cand> out;
    const bool committed = any_committed(cn, s.locations);
    auto committed_ok = [&](const Cand& c) {
        if (!committed) return true;
        for (const auto& [a, ei] : c.edges)
            if (cn.automata[a].locations[cn.automata[a].edges[ei].from].committed) return true;
        return false;
    };

    for (std::uint32_t a = 0; a < cn.automata.size(); ++a) {
        const auto& ca = cn.automata[a];
        for (std::uint32_t ei : ca.out[s.locations[a]]) {
            const CEdge& e = ca.edges[ei];
            if (e.dir == SyncDir::Receive) continue;  // receivers never initiate
            if (!discrete_enabled(e, s.discrete)) continue;
            if (e.dir == SyncDir::Silent) {
                Cand c;
                c.edges.emplace_back(a, ei);
                if (committed_ok(c)) out.push_back(std::move(c));
                continue;
            }
            const auto& ch = cn.channels[e.channel];
            if (ch.kind == ChannelKind::Handshake) {
                // One emitter pairs with exactly one receiver edge.
                for (std::uint32_t b = 0; b < cn.automata.size(); ++b) {
                    if (b == a) continue;
                    const auto& cb = cn.automata[b];
                    for (std::uint32_t fi : cb.out[s.locations[b]]) {
                        const CEdge& f = cb.edges[fi];
                        if (f.dir != SyncDir::Receive || f.channel != e.channel) continue;
                        if (!discrete_enabled(f, s.discrete)) continue;
                        Cand c;
                        c.channel = e.channel;
                        c.edges.emplace_back(a, ei);
                        c.edges.emplace_back(b, fi);
                        if (committed_ok(c)) out.push_back(std::move(c));
                    }
                }
            } else {
                // Broadcast: every automaton with an enabled receiving edge
                // participates; one successor per edge-choice combination.
                std::vector<std::pair<std::uint32_t, std::vector<std::uint32_t>>> recv;
                for (std::uint32_t b = 0; b < cn.automata.size(); ++b) {
                    if (b == a) continue;
                    const auto& cb = cn.automata[b];
                    std::vector<std::uint32_t> options;
                    for (std::uint32_t fi : cb.out[s.locations[b]]) {
                        const CEdge& f = cb.edges[fi];
                        if (f.dir == SyncDir::Receive && f.channel == e.channel &&
                            discrete_enabled(f, s.discrete))
                            options.push_back(fi);
                    }
                    if (!options.empty()) recv.emplace_back(b, std::move(options));
                }
                std::vector<std::size_t> pick(recv.size(), 0);
                while (true) {
                    Cand c;
                    c.channel = e.channel;
                    c.edges.emplace_back(a, ei);
                    for (std::size_t r = 0; r < recv.size(); ++r)
                        c.edges.emplace_back(recv[r].first, recv[r].second[pick[r]]);
                    if (committed_ok(c)) out.push_back(std::move(c));
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
    return out;
}

struct EnabledCand {
    Cand cand;
    Dbm zone;  // s.zone ∧ all clock guards, nonempty
};

std::vector<EnabledCand> enabled_candidates(const CompiledNetwork& cn, const SymbolicState& s) {
    std::vector<EnabledCand> enabled;
    for (Cand& c : enumerate_candidates(cn, s)) {
        std::vector<ClockConstraint> guards;
        for (const auto& [a, ei] : c.edges) {
            const auto& g = cn.automata[a].edges[ei].guard;
            guards.insert(guards.end(), g.begin(), g.end());
        }
        Dbm z = guards.empty() ? s.zone : s.zone.constrained_all(guards);
        if (z.is_empty()) continue;
        enabled.push_back(EnabledCand{std::move(c), std::move(z)});
    }
    // Channel priority: drop a transition when a strictly higher-priority
    // channel of the same group has an enabled transition in this state.
    std::vector<EnabledCand> out;
    out.reserve(enabled.size());
    for (EnabledCand& ec : enabled) {
        bool dominated = false;
        if (ec.cand.channel >= 0 && cn.channels[ec.cand.channel].group >= 0) {
            const auto& ch = cn.channels[ec.cand.channel];
            for (const EnabledCand& other : enabled) {
                if (other.cand.channel < 0) continue;
                const auto& och = cn.channels[other.cand.channel];
                if (och.group == ch.group && och.priority > ch.priority) {
                    dominated = true;
                    break;
                }
            }
        }
        if (!dominated) out.push_back(std::move(ec));
    }
    return out;
}

std::optional<SymbolicState> fire(const CompiledNetwork& cn, const SymbolicState& s,
                                  const EnabledCand& ec) {
    SymbolicState t;
    t.locations = s.locations;
    t.discrete = s.discrete;
    // Emitter updates run first, then receivers in automaton order.
    for (const auto& [a, ei] : ec.cand.edges) {
        const CEdge& e = cn.automata[a].edges[ei];
        t.locations[a] = e.to;
        for (const auto& u : e.updates) apply_update(cn, a, e, u, t.discrete);
    }
    Dbm z = ec.zone;
    for (const auto& [a, ei] : ec.cand.edges)
        for (ClockIndex r : cn.automata[a].edges[ei].resets) z = z.reset(r);
    const auto inv = invariants_at(cn, t.locations);
    z = z.constrained_all(inv);
    if (z.is_empty()) return std::nullopt;
    if (!any_committed(cn, t.locations)) {
        z = z.up().constrained_all(inv);
        if (z.is_empty()) return std::nullopt;
    }
    t.zone = std::move(z);
    return t;
}

SymbolicState make_initial(const CompiledNetwork& cn) {
    SymbolicState s;
    for (const auto& a : cn.automata) s.locations.push_back(a.initial);
    s.discrete = cn.initial_discrete();
    const auto inv = invariants_at(cn, s.locations);
    Dbm z = Dbm::zero(cn.clock_total).constrained_all(inv);
    if (z.is_empty()) throw ModelError("initial state violates location invariants");
    if (!any_committed(cn, s.locations)) {
        z = z.up().constrained_all(inv);
        if (z.is_empty()) throw ModelError("initial state violates location invariants");
    }
    s.zone = std::move(z);
    return s;
}

// Post-hoc must-synchronize check for tests: after a broadcast fires, no
// bystander may still have an enabled receiving edge for that channel.
void verify_broadcast(const CompiledNetwork& cn, const SymbolicState& pre, const Cand& cand) {
    if (cand.channel < 0 || cn.channels[cand.channel].kind != ChannelKind::Broadcast) return;
    for (std::uint32_t b = 0; b < cn.automata.size(); ++b) {
        bool participant = false;
        for (const auto& [a, ei] : cand.edges)
            if (a == b) participant = true;
        if (participant) continue;
        for (std::uint32_t fi : cn.automata[b].out[pre.locations[b]]) {
            const CEdge& f = cn.automata[b].edges[fi];
            if (f.dir == SyncDir::Receive && f.channel == cand.channel &&
                discrete_enabled(f, pre.discrete))
                throw std::logic_error("broadcast must-synchronize violated for automaton " +
                                       cn.automata[b].name);
        }
    }
}

}  // namespace

// ── Public single-state semantics ───────────────────────────────────────────

SymbolicState initial_state(const Network& n) { return make_initial(CompiledNetwork(n)); }

std::vector<SymbolicState> successors(const SymbolicState& s, const Network& n) {
    const CompiledNetwork cn(n);
    std::vector<SymbolicState> out;
    for (const EnabledCand& ec : enabled_candidates(cn, s))
        if (auto t = fire(cn, s, ec)) out.push_back(std::move(*t));
    return out;
}

// ── Zone graph ──────────────────────────────────────────────────────────────

ZoneGraph::ZoneGraph() = default;
ZoneGraph::ZoneGraph(ZoneGraph&&) noexcept = default;
ZoneGraph& ZoneGraph::operator=(ZoneGraph&&) noexcept = default;
ZoneGraph::~ZoneGraph() = default;

const Network& ZoneGraph::network() const { return compiled_->source; }

ZoneGraph build_zone_graph(const Network& n, const ExploreOptions& opts) {
    ZoneGraph g;
    auto compiled = std::make_shared<CompiledNetwork>(n);
    // Query clocks are exempt from the model-derived max constant: they get
    // the (large) cap instead, and queries later refuse widened projections.
    for (const ClockRef& r : opts.query_clocks) {
        const ClockIndex x = compiled->resolve_clock(r);
        compiled->max_const[x] = std::max(compiled->max_const[x], opts.query_clock_cap);
    }
    const CompiledNetwork& cn = *compiled;
    g.compiled_ = compiled;
    g.query_clocks_ = opts.query_clocks;
    g.query_clock_cap_ = opts.query_clock_cap;

    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> passed;
    auto key_of = [](const SymbolicState& s) {
        std::uint64_t h = 1099511628211ULL;
        for (std::uint32_t l : s.locations) {
            h ^= l;
            h *= 1099511628211ULL;
        }
        h ^= s.discrete.hash();
        h *= 1099511628211ULL;
        return h;
    };
    auto same_discrete_part = [](const SymbolicState& a, const SymbolicState& b) {
        return a.locations == b.locations && a.discrete == b.discrete;
    };

    SymbolicState init = make_initial(cn);
    init.zone = init.zone.extrapolated(cn.max_const);
    g.states_.push_back(std::move(init));
    g.parent_.push_back(UINT32_MAX);
    passed[key_of(g.states_[0])].push_back(0);
    g.stats_.states_stored = 1;

    std::deque<std::uint32_t> waiting;
    waiting.push_back(0);
    g.stats_.peak_waiting = 1;

    while (!waiting.empty()) {
        const std::uint32_t idx = waiting.front();
        waiting.pop_front();
        ++g.stats_.states_expanded;
        // states_ may reallocate while this state's successors are added.
        const SymbolicState cur = g.states_[idx];
        for (const EnabledCand& ec : enabled_candidates(cn, cur)) {
            auto t = fire(cn, cur, ec);
            if (!t) continue;
            ++g.stats_.transitions;
            if (opts.verify_semantics) verify_broadcast(cn, cur, ec.cand);
            t->zone = t->zone.extrapolated(cn.max_const);
            auto& bucket = passed[key_of(*t)];
            bool skip = false;
            for (std::uint32_t prev : bucket) {
                const SymbolicState& p = g.states_[prev];
                if (!same_discrete_part(p, *t)) continue;
                if (opts.subsumption ? p.zone.includes(t->zone) : p.zone == t->zone) {
                    skip = true;
                    break;
                }
            }
            if (skip) continue;
            if (g.states_.size() >= opts.state_budget)
                throw ResourceError("state budget exceeded (" + std::to_string(opts.state_budget) +
                                    " states)");
            bucket.push_back(std::uint32_t(g.states_.size()));
            waiting.push_back(std::uint32_t(g.states_.size()));
            g.states_.push_back(std::move(*t));
            g.parent_.push_back(idx);
            ++g.stats_.states_stored;
            g.stats_.peak_waiting = std::max<std::uint64_t>(g.stats_.peak_waiting, waiting.size());
        }
    }
    return g;
}

// ── Queries ─────────────────────────────────────────────────────────────────

class QueryEval {
public:
    QueryEval(const ZoneGraph& g, const StateFormula& f) {
        const CompiledNetwork& cn = *g.compiled_;
        for (const auto& la : f.locations) {
            auto it = cn.automaton_index.find(la.automaton);
            if (it == cn.automaton_index.end())
                throw InputError("unknown automaton in formula: " + la.automaton);
            const auto& ca = cn.automata[it->second];
            auto lt = ca.loc_index.find(la.location);
            if (lt == ca.loc_index.end())
                throw InputError("unknown location in formula: " + la.automaton + "." + la.location);
            locs_.emplace_back(it->second, lt->second);
        }
        for (const auto& da : f.discrete)
            atoms_.push_back({cn.resolve_term(da.lhs), da.op, cn.resolve_term(da.rhs)});
        for (const auto& catom : f.clocks) {
            const ClockIndex x = cn.resolve_clock(catom.clock);
            append_constraints(clock_constraints_, x, kRefClock, catom.op, catom.bound);
        }
    }

    bool prop_holds(const SymbolicState& s) const {
        for (const auto& [a, l] : locs_)
            if (s.locations[a] != l) return false;
        for (const auto& atom : atoms_)
            if (!eval_cmp(eval_term(atom.lhs, s.discrete), atom.op, eval_term(atom.rhs, s.discrete)))
                return false;
        return true;
    }

    Dbm constrained_zone(const SymbolicState& s) const {
        return clock_constraints_.empty() ? s.zone : s.zone.constrained_all(clock_constraints_);
    }

private:
    std::vector<std::pair<std::uint32_t, std::uint32_t>> locs_;
    std::vector<CompiledNetwork::CDiscreteAtom> atoms_;
    std::vector<ClockConstraint> clock_constraints_;
};

namespace {

ClockIndex require_query_clock(const CompiledNetwork& cn, const ClockRef& x,
                               const std::vector<ClockRef>& flagged) {
    for (const ClockRef& r : flagged)
        if (r.automaton == x.automaton && r.clock == x.clock) return cn.resolve_clock(x);
    throw UsageError("clock " + x.automaton + "." + x.clock +
                     " was not flagged as a query clock at build time");
}

}  // namespace

ExtremumResult query_extremum(const ZoneGraph& g, const StateFormula& f, const ClockRef& x,
                              ExtremumMode mode) {
    const ClockIndex gx = require_query_clock(*g.compiled_, x, g.query_clocks_);
    QueryEval eval(g, f);
    ExtremumResult res;
    for (std::size_t i = 0; i < g.state_count(); ++i) {
        const SymbolicState& s = g.state(i);
        if (!eval.prop_holds(s)) continue;
        const Dbm z = eval.constrained_zone(s);
        if (z.is_empty()) continue;
        const ClockInterval iv = z.interval_of(gx);
        if (mode == ExtremumMode::Sup) {
            if (iv.upper.is_infinity() || iv.upper.value >= g.query_clock_cap_)
                throw ResourceError("query clock " + x.automaton + "." + x.clock +
                                    " exceeded the extrapolation cap; raise the cap");
            if (iv.upper.strict)
                throw ModelError("strict upper projection; the model class requires closed constraints");
            if (!res.satisfied || iv.upper.value > res.value) res.value = iv.upper.value;
        } else {
            if (iv.lower.strict)
                throw ModelError("strict lower projection; the model class requires closed constraints");
            if (iv.lower.value <= -g.query_clock_cap_)
                throw ResourceError("query clock lower bound hit the extrapolation cap");
            if (!res.satisfied || iv.lower.value < res.value) res.value = iv.lower.value;
        }
        res.satisfied = true;
    }
    return res;
}

IntervalSet query_bounds(const ZoneGraph& g, const StateFormula& f, const ClockRef& x) {
    const ClockIndex gx = require_query_clock(*g.compiled_, x, g.query_clocks_);
    QueryEval eval(g, f);
    IntervalSet out;
    for (std::size_t i = 0; i < g.state_count(); ++i) {
        const SymbolicState& s = g.state(i);
        if (!eval.prop_holds(s)) continue;
        const Dbm z = eval.constrained_zone(s);
        if (z.is_empty()) continue;
        const ClockInterval iv = z.interval_of(gx);
        if (iv.lower.strict || iv.upper.strict)
            throw ModelError("strict interval endpoint; the model class requires closed constraints");
        if (iv.upper.is_infinity() || iv.upper.value >= g.query_clock_cap_)
            throw ResourceError("query clock " + x.automaton + "." + x.clock +
                                " exceeded the extrapolation cap; raise the cap");
        out.add(iv.lower.value, iv.upper.value);
    }
    return out;
}

bool query_reachable(const ZoneGraph& g, const StateFormula& f) {
    QueryEval eval(g, f);
    for (std::size_t i = 0; i < g.state_count(); ++i) {
        const SymbolicState& s = g.state(i);
        if (!eval.prop_holds(s)) continue;
        if (!eval.constrained_zone(s).is_empty()) return true;
    }
    return false;
}

std::optional<std::string> ZoneGraph::trace_to(const StateFormula& f) const {
    QueryEval eval(*this, f);
    std::size_t target = SIZE_MAX;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (eval.prop_holds(states_[i]) && !eval.constrained_zone(states_[i]).is_empty()) {
            target = i;
            break;
        }
    }
    if (target == SIZE_MAX) return std::nullopt;
    std::vector<std::uint32_t> path;
    for (std::uint32_t i = std::uint32_t(target); i != UINT32_MAX; i = parent_[i]) path.push_back(i);
    std::reverse(path.begin(), path.end());
    const CompiledNetwork& cn = *compiled_;
    std::ostringstream os;
    for (std::size_t step = 0; step < path.size(); ++step) {
        const SymbolicState& s = states_[path[step]];
        os << "step " << step << ":";
        if (step > 0) {
            const SymbolicState& prev = states_[path[step - 1]];
            os << " moved";
            for (std::uint32_t a = 0; a < cn.automata.size(); ++a) {
                if (prev.locations[a] == s.locations[a]) continue;
                os << " " << cn.automata[a].name << "("
                   << cn.automata[a].locations[prev.locations[a]].name << "->"
                   << cn.automata[a].locations[s.locations[a]].name << ")";
            }
        } else {
            os << " initial";
        }
        os << " |";
        for (std::uint32_t a = 0; a < cn.automata.size(); ++a) {
            const auto& ca = cn.automata[a];
            for (const auto& [name, gx] : ca.clock_names) {
                const ClockInterval iv = s.zone.interval_of(gx);
                os << " " << ca.name << "." << name << "=[" << iv.lower.value << ","
                   << (iv.upper.is_infinity() ? std::string("inf") : std::to_string(iv.upper.value))
                   << "]";
            }
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace intercore
