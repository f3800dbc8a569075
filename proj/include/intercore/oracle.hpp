#ifndef INTERCORE_ORACLE_HPP
#define INTERCORE_ORACLE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "intercore/abstraction.hpp"
#include "intercore/automata.hpp"
#include "intercore/bounds.hpp"
#include "intercore/explorer.hpp"
#include "intercore/rts.hpp"

namespace intercore {

// Independent digitized semantics: brute-force breadth-first exploration of a
// closed-constraint network over unit delays and integer valuations, up to an
// absolute-time horizon. This module deliberately re-implements enabledness,
// committed, broadcast and priority rules over concrete integer states -
// never through the DBM path - so it can serve as the ground truth for the
// symbolic engine and the abstraction pipeline.

struct DigitizedOptions {
    std::uint64_t state_budget = 5'000'000;
};

class DigitizedGraph {
public:
    struct Node {
        std::vector<std::uint32_t> locations;
        DiscreteState discrete;
        std::vector<std::int64_t> clocks;  // by global clock index - 1
        std::int64_t time = 0;
    };
    struct Arc {
        std::uint32_t from = 0;
        std::uint32_t to = 0;
        bool delay = false;
        std::string event;  // emitting channel name, empty for none
    };

    std::vector<Node> nodes;
    std::vector<Arc> arcs;
    std::vector<std::vector<std::uint32_t>> out;  // arc indices per node

    // Name lookup captured at exploration time.
    std::map<std::string, std::uint32_t> automaton_index;
    std::vector<std::map<std::string, std::uint32_t>> location_index;  // per automaton
    std::vector<std::map<std::string, std::uint32_t>> clock_index;     // per automaton, global-1

    bool at(const Node& n, const std::string& automaton, const std::string& location) const;
    std::int64_t clock_value(const Node& n, const std::string& automaton,
                             const std::string& clock) const;
};

// BFS over unit-delay and action transitions up to absolute time = horizon.
// Open (strict) constraints are refused: unit-delay digitization is only
// sound for closed models.
DigitizedGraph digitized_explore(const Network& n, std::int64_t horizon,
                                 const DigitizedOptions& opts = {});

// ── Derived oracle results ──────────────────────────────────────────────────

// Instants with the automaton at the location and clock y within [lb, rb].
std::vector<std::int64_t> window_instants(const DigitizedGraph& g, const std::string& automaton,
                                          const std::string& location, std::int64_t lb,
                                          std::int64_t rb);

// Instants at which an emission on the named channel fires.
std::vector<std::int64_t> emission_instants(const DigitizedGraph& g, const std::string& event);

// Same-visit instant pairs (t1 in window1, t2 >= t1 in window2) while the
// automaton stays at the location: the realizable consecutive-event timings
// of a multi-event segment.
std::set<std::pair<std::int64_t, std::int64_t>> window_pairs(
    const DigitizedGraph& g, const std::string& automaton, const std::string& location,
    std::int64_t lb1, std::int64_t rb1, std::int64_t lb2, std::int64_t rb2);

// Pairs (t1, t2): an emission of first at t1 followed on some path by an
// emission of second at t2 with no intermediate emission of first.
std::set<std::pair<std::int64_t, std::int64_t>> emission_pairs(const DigitizedGraph& g,
                                                               const std::string& first,
                                                               const std::string& second);

// Integer shadow of the interval-extraction algorithm: production instants of
// each producing segment's first event on the core network, grouped per
// period, maximal runs of consecutive integers reported as intervals.
IvTable oracle_intervals(const Network& core_network, const RtsSpec& r, const EventSpec& e,
                         const std::string& core, std::int64_t horizon,
                         const DigitizedOptions& opts = {});

// Integer shadow of the schedulability check: per-task max of clock x over
// end states.
std::map<std::string, std::int64_t> oracle_wcrt(const RtsSpec& r, const std::string& core,
                                                std::int64_t horizon,
                                                const DigitizedOptions& opts = {});

struct OracleBoundResult {
    bool satisfied = false;
    std::int64_t value = 0;
};

// Extremal chain latency over all digitized traces of a network with event
// channels, per the requirement's FF/LF/simple semantics. Implemented as a
// longest/shortest-path analysis over the digitized graph, independent of
// the observer construction.
OracleBoundResult oracle_bound(const Network& network_with_events, const Requirement& req,
                               std::int64_t horizon, const DigitizedOptions& opts = {});

}  // namespace intercore

#endif  // INTERCORE_ORACLE_HPP
