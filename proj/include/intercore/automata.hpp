#ifndef INTERCORE_AUTOMATA_HPP
#define INTERCORE_AUTOMATA_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace intercore {

// Extended timed automata: clocks, locations with invariants and
// committed/initial flags, edges with clock+discrete guards, channel
// synchronization, clock resets and discrete updates (scalar assignments and
// the queue primitives the scheduler needs). Networks are immutable after
// validation and safe to share across query workers.

enum class ChannelKind { Handshake, Broadcast };
enum class SyncDir { Silent, Emit, Receive };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Channel {
    std::string name;
    ChannelKind kind = ChannelKind::Handshake;
    // Priority comparisons apply only between channels sharing a non-empty
    // group; a transition is dropped when a strictly higher-priority channel
    // of the same group has an enabled transition in the same state.
    int priority = 0;
    std::string group;
};

// Discrete term: integer literal, scalar variable, or a queue observation.
struct Term {
    enum class Kind { Literal, Var, QueueHeadId, QueueHeadPr, QueueSecondPr, QueueSize };
    Kind kind = Kind::Literal;
    std::int64_t literal = 0;
    std::string name;  // variable or queue

    static Term lit(std::int64_t v) { return Term{Kind::Literal, v, {}}; }
    static Term var(std::string n) { return Term{Kind::Var, 0, std::move(n)}; }
    static Term queue(Kind k, std::string q) { return Term{k, 0, std::move(q)}; }
};

struct DiscreteAtom {
    Term lhs;
    CmpOp op = CmpOp::Eq;
    Term rhs;
};

// Atomic clock constraint over clocks of the owning automaton:
// clock [- minus_clock] op bound. Diagonal form is accepted by the syntax
// and DBM layer but unused by the generators in this toolkit.
struct ClockAtom {
    std::string clock;
    std::string minus_clock;  // empty for single-clock atoms
    CmpOp op = CmpOp::Le;
    std::int64_t bound = 0;
};

struct Update {
    enum class Kind { Assign, QueueAdd, QueueDequeue, QueueResort, QueueSortBehindHead };
    Kind kind = Kind::Assign;
    std::string target;          // scalar variable or queue
    Term value;                  // Assign payload
    std::int64_t id = 0, pr = 0; // QueueAdd payload

    static Update assign(std::string var, Term v) {
        Update u;
        u.kind = Kind::Assign;
        u.target = std::move(var);
        u.value = v;
        return u;
    }
    static Update queue_add(std::string q, std::int64_t id, std::int64_t pr) {
        Update u;
        u.kind = Kind::QueueAdd;
        u.target = std::move(q);
        u.id = id;
        u.pr = pr;
        return u;
    }
    static Update queue_op(Kind k, std::string q) {
        Update u;
        u.kind = k;
        u.target = std::move(q);
        return u;
    }
};

struct Edge {
    std::string from;
    std::string to;
    std::vector<ClockAtom> clock_guard;
    std::vector<DiscreteAtom> discrete_guard;
    SyncDir sync = SyncDir::Silent;
    std::string channel;  // empty iff silent
    std::vector<std::string> resets;
    std::vector<Update> updates;
};

struct Location {
    std::string name;
    std::vector<ClockAtom> invariant;
    bool committed = false;
    bool initial = false;
};

struct TimedAutomaton {
    std::string name;
    std::vector<std::string> clocks;
    std::vector<Location> locations;
    std::vector<Edge> edges;
};

struct VarDecl {
    enum class Kind { Int, Queue };
    Kind kind = Kind::Int;
    std::string name;
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::int64_t init = 0;
    std::int64_t capacity = 0;  // queues

    static VarDecl scalar(std::string n, std::int64_t mn, std::int64_t mx, std::int64_t in) {
        return VarDecl{Kind::Int, std::move(n), mn, mx, in, 0};
    }
    static VarDecl queue(std::string n, std::int64_t cap) {
        return VarDecl{Kind::Queue, std::move(n), 0, 0, 0, cap};
    }
};

struct Network {
    std::vector<TimedAutomaton> automata;
    std::vector<Channel> channels;
    std::vector<VarDecl> variables;
};

struct Diagnostic {
    std::string path;     // element path, e.g. "automata[2].edges[0].to"
    std::string message;
};

// Structural well-formedness. Empty result iff the network satisfies all
// type invariants (unique names, resolvable references, one initial location
// per automaton, bounded variables, no clock guards on broadcast receivers).
std::vector<Diagnostic> validate_network(const Network& n);

// Parallel composition: union of automata, channels and variables. Channels
// shared by name must agree on kind, priority and group; duplicate automaton
// or variable names are errors. Associative and commutative up to automaton
// ordering.
Network compose(const std::vector<Network>& parts);

// Byte-stable JSON serialization (fixed field order, 2-space indent,
// trailing newline). See docs/ta.schema.json.
std::string network_to_json(const Network& n);
Network network_from_json(const std::string& text);

std::string to_string(CmpOp op);
CmpOp cmp_from_string(const std::string& s);

}  // namespace intercore

#endif  // INTERCORE_AUTOMATA_HPP
