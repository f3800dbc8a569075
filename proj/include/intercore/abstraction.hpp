#ifndef INTERCORE_ABSTRACTION_HPP
#define INTERCORE_ABSTRACTION_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "intercore/automata.hpp"
#include "intercore/explorer.hpp"
#include "intercore/interval_set.hpp"
#include "intercore/rts.hpp"

namespace intercore {

// Exact event-production abstractions: per analyzed core, the absolute
// instants at which the core's producing task emits its events are extracted
// from the full core network with a single bounds query per segment, grouped
// by period, and compiled into a small one- or two-clock automaton that
// reproduces exactly those instants (including ordering constraints between
// events of one segment).

// ── Event specification ─────────────────────────────────────────────────────

struct EventProduction {
    std::string event;
    std::int64_t lb = 0;  // relative to segment start
    std::int64_t rb = 0;
};

struct Producer {
    std::string task;
    std::string segment;
    std::vector<EventProduction> emits;  // ordered; earlier events fire first
};

struct EventSpec {
    std::vector<std::string> events;
    std::vector<Producer> producers;
};

struct EventDiagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    // Errors with this flag become warnings under --force (exactness is then
    // the user's responsibility and recorded in the run manifest).
    bool force_downgradable = false;
    std::string path;
    std::string message;
};

std::vector<EventDiagnostic> validate_event_spec(const RtsSpec& r, const EventSpec& e);

EventSpec events_from_json(const std::string& text);

// Cores carrying producing tasks, in rts core order.
std::vector<std::string> event_cores(const RtsSpec& r, const EventSpec& e);
// The unique producing task of the core (distinct-affinity restriction).
const Task* producing_task(const RtsSpec& r, const EventSpec& e, const std::string& core);
// Producers of one task, in producer declaration order.
std::vector<const Producer*> task_producers(const EventSpec& e, const std::string& task);

// ── Reference timelock ──────────────────────────────────────────────────────

// One clock, one location `hper` with invariant x <= hp and no edges: an
// artificial timelock that stops exploration at the hyperperiod while
// providing an absolute time reference.
TimedAutomaton build_ref_ta(std::int64_t hp);
Network ref_network(std::int64_t hp);

// ── Interval extraction ─────────────────────────────────────────────────────

struct SegmentIntervals {
    std::string task;
    std::string segment;
    std::string first_event;
    std::int64_t period = 0;
    std::int64_t periods = 0;        // hp / period
    IntervalSet global;              // one bounds query over [0, hp]
    std::vector<IntervalSet> per_period;  // index k-1, clamped to [(k-1)P, kP]
};

struct IvTable {
    std::string core;
    std::int64_t hyperperiod = 0;
    std::vector<SegmentIntervals> segments;
    ExploreStats stats;

    const SegmentIntervals* find(const std::string& segment) const;
};

struct IntervalOptions {
    std::uint64_t state_budget = 50'000'000;
    std::ostream* verbose = nullptr;
    // Pre-built core network (the --xta path); generated when null.
    const Network* prebuilt = nullptr;
};

// Algorithm: compose N_c with Ref(hp_c), build the zone graph once, then for
// each producing segment query
//   bounds{TA_tau.s and lb <= TA_tau.y <= rb and Ref.hper}: Ref.x
// with [lb, rb] the first event's relative interval, and group the resulting
// global interval set by period (intervals straddling a boundary are split,
// the boundary point belonging to both periods).
IvTable compute_exact_intervals(const RtsSpec& r, const EventSpec& e, const std::string& core,
                                const IntervalOptions& opts = {});

// Coarse variant: every per-period set replaced by its hull [min, max],
// exhibiting the hole phenomenon.
IvTable coarsened(const IvTable& iv);

// ── Abstraction generation ──────────────────────────────────────────────────

// Single-job construction. Locations <segment>_<k> (plus <segment>_<k>_<i>_<j>
// for multi-event segments) and wait; one emission edge per interval.
TimedAutomaton generate_abstraction_single_job(const Task& t, const IvTable& iv,
                                               const EventSpec& e);

// General construction: single-job tasks take the construction above;
// multi-job tasks get a committed initial act that branches into each job's
// segment chain, plus cross-job edges between consecutive periods.
TimedAutomaton generate_abstraction_general(const Task& t, const IvTable& iv, const EventSpec& e);

// A_<core> plus one broadcast channel per event in E.
Network abstraction_network(const RtsSpec& r, const EventSpec& e, const std::string& core,
                            const IvTable& iv);

// A(N_E) = || of per-core abstraction networks; at least two parts.
Network compose_abstract_network(const std::vector<Network>& parts);

std::string abstraction_automaton(const std::string& core);

// intervals.json payload for a set of per-core tables.
std::string intervals_to_json(const std::vector<IvTable>& tables);

}  // namespace intercore

#endif  // INTERCORE_ABSTRACTION_HPP
