#ifndef INTERCORE_BOUNDS_HPP
#define INTERCORE_BOUNDS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "intercore/abstraction.hpp"
#include "intercore/automata.hpp"
#include "intercore/explorer.hpp"

namespace intercore {

// Latency observers and final bound computation over A(N_E) || Obs. The
// observers are receive-only automata with one clock x, reset on chain-start
// edges; the measurement location recv is reached exactly on chain
// completion, so sup/inf of Obs.x over {Obs.recv} is the requested bound.

enum class RequirementKind { SimpleMax, FirstToFirst, LastToFirst };
enum class BoundMode { Min, Max };

struct Requirement {
    RequirementKind kind = RequirementKind::SimpleMax;
    std::vector<std::string> events;  // simple-max: {a, b}; ff/lf: {w, r, w2}
    BoundMode mode = BoundMode::Max;
};

std::vector<Diagnostic> validate_requirement(const Requirement& req, const EventSpec& e);
Requirement requirement_from_json(const std::string& text);

// simple-max: idle -> recv on the first event (reset x), back on the second;
// recv deliberately has no restart edge, so only maximal bounds are exact.
// ff: chain w -> r -> w2 with overwriting w occurrences at await_w_2 either
// ignored (self-loop) or adopted as the new chain start (reset x).
// lf: ff plus a reset loop at await_r_1, so measurement restarts at the last
// w before r. For ff/lf, recv is committed with a silent restart edge: x at
// recv is exactly the chain latency, supporting both min and max.
TimedAutomaton build_observer(const Requirement& req);

struct BoundOptions {
    std::uint64_t state_budget = 50'000'000;
    // Extrapolation cap for Obs.x; valid chains complete within twice the
    // lcm of the hyperperiods involved, so callers pass 2*lcm + 1.
    std::int64_t observer_cap = INT64_C(1) << 40;
};

struct BoundResult {
    bool satisfied = false;  // recv unreachable => requirement never completes
    std::int64_t value = 0;
    ExploreStats stats;
};

// Composes the network with the requirement's observer, explores to the
// fixed point and evaluates the extremum of Obs.x over {Obs.recv}.
BoundResult compute_bound(const Network& abstract_network, const Requirement& req,
                          const BoundOptions& opts = {});

}  // namespace intercore

#endif  // INTERCORE_BOUNDS_HPP
