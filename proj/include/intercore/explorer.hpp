#ifndef INTERCORE_EXPLORER_HPP
#define INTERCORE_EXPLORER_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "intercore/automata.hpp"
#include "intercore/dbm.hpp"
#include "intercore/interval_set.hpp"

namespace intercore {

// ── Discrete state ──────────────────────────────────────────────────────────

struct QueueRec {
    std::int64_t id = 0;
    std::int64_t pr = 0;
    bool operator==(const QueueRec&) const = default;
};

struct DiscreteState {
    std::vector<std::int64_t> scalars;           // by variable declaration order
    std::vector<std::vector<QueueRec>> queues;   // by queue declaration order
    bool operator==(const DiscreteState&) const = default;
    std::size_t hash() const;
};

// Sentinels reported by queue observation terms on short queues, chosen so
// that guards comparing against them are never satisfied by accident.
inline constexpr std::int64_t kNoTaskId = -1;
inline constexpr std::int64_t kNoPriority = INT64_MIN / 4;

// ── Symbolic state ──────────────────────────────────────────────────────────

struct SymbolicState {
    std::vector<std::uint32_t> locations;  // one per automaton, index into its location list
    DiscreteState discrete;
    Dbm zone;
};

// ── State formulas ──────────────────────────────────────────────────────────

struct ClockRef {
    std::string automaton;
    std::string clock;
};

// Conjunction of location propositions, discrete comparisons and atomic
// clock constraints, evaluated per symbolic state.
struct StateFormula {
    struct LocationAtom {
        std::string automaton;
        std::string location;
    };
    struct ClockFormulaAtom {
        ClockRef clock;
        CmpOp op = CmpOp::Le;
        std::int64_t bound = 0;
    };
    std::vector<LocationAtom> locations;
    std::vector<DiscreteAtom> discrete;  // terms resolve against network variables
    std::vector<ClockFormulaAtom> clocks;
};

// ── Exploration ─────────────────────────────────────────────────────────────

struct ExploreOptions {
    std::uint64_t state_budget = 50'000'000;
    bool subsumption = true;
    // Clocks the caller will query: they receive max-constant `query_clock_cap`
    // instead of the model-derived one, and collected projections are checked
    // against the cap so widened values surface as errors, never as numbers.
    std::vector<ClockRef> query_clocks;
    std::int64_t query_clock_cap = INT64_C(1) << 40;
    // Extra semantic checks (committed states not delay-closed, broadcast
    // must-synchronize); meant for tests on small models.
    bool verify_semantics = false;
};

struct ExploreStats {
    std::uint64_t states_stored = 0;
    std::uint64_t states_expanded = 0;
    std::uint64_t transitions = 0;
    std::uint64_t peak_waiting = 0;
};

class CompiledNetwork;  // internal

enum class ExtremumMode { Sup, Inf };

struct ExtremumResult {
    bool satisfied = false;
    std::int64_t value = 0;
};

// Forward zone-graph exploration result: all reachable symbolic states under
// subsumption, plus enough bookkeeping to answer queries and dump traces.
class ZoneGraph {
public:
    ZoneGraph(ZoneGraph&&) noexcept;
    ZoneGraph& operator=(ZoneGraph&&) noexcept;
    ~ZoneGraph();

    const ExploreStats& stats() const { return stats_; }
    std::size_t state_count() const { return states_.size(); }
    const SymbolicState& state(std::size_t i) const { return states_[i]; }
    const Network& network() const;

    // Line-oriented witness path to the first stored state satisfying f:
    // one line per step with the moved automata and each clock's projection.
    std::optional<std::string> trace_to(const StateFormula& f) const;

private:
    friend ZoneGraph build_zone_graph(const Network&, const ExploreOptions&);
    friend class QueryEval;
    friend ExtremumResult query_extremum(const ZoneGraph&, const StateFormula&, const ClockRef&,
                                         ExtremumMode);
    friend IntervalSet query_bounds(const ZoneGraph&, const StateFormula&, const ClockRef&);
    ZoneGraph();

    std::shared_ptr<const CompiledNetwork> compiled_;
    std::vector<SymbolicState> states_;
    std::vector<std::uint32_t> parent_;
    ExploreStats stats_;
    std::vector<ClockRef> query_clocks_;
    std::int64_t query_clock_cap_ = 0;
};

// Initial symbolic state: initial locations and valuation, zero zone
// intersected with invariants, delay-closed unless a committed initial
// location forbids it. Throws ModelError when invariants exclude the origin.
SymbolicState initial_state(const Network& n);

// All action successors of s under the network semantics: committed-location
// restriction, handshake pairing, broadcast must-synchronize, channel
// priority within groups, then guard/reset/update/invariant/delay-closure.
std::vector<SymbolicState> successors(const SymbolicState& s, const Network& n);

ZoneGraph build_zone_graph(const Network& n, const ExploreOptions& opts = {});

// ── Queries ─────────────────────────────────────────────────────────────────

// Max (resp. min) value of the clock over all states satisfying f; the
// clock must have been named in ExploreOptions::query_clocks.
ExtremumResult query_extremum(const ZoneGraph& g, const StateFormula& f, const ClockRef& x,
                              ExtremumMode mode);

// Exact union of the possible values of the clock where f holds, as a
// normalized interval set. Generalizes sup and inf: min(first) = inf,
// max(last) = sup. Errors on strict or widened projections (the generated
// model class is closed).
IntervalSet query_bounds(const ZoneGraph& g, const StateFormula& f, const ClockRef& x);

bool query_reachable(const ZoneGraph& g, const StateFormula& f);

}  // namespace intercore

#endif  // INTERCORE_EXPLORER_HPP
