#ifndef INTERCORE_RTS_HPP
#define INTERCORE_RTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "intercore/automata.hpp"
#include "intercore/explorer.hpp"

namespace intercore {

// Declarative real-time system model: periodic tasks with multi-path segment
// FSMs under partitioned fixed-priority scheduling with limited preemption.
// Segment WCETs arrive with blocking already folded in, so core networks are
// independent of each other.

struct Segment {
    std::string name;
    std::int64_t bcet = 0;
    std::int64_t wcet = 0;
};

struct TaskFsm {
    // Transitions between "act", "end" and segment names. act has no
    // predecessors, end no successors, and each maximal act->end path is
    // finite.
    std::vector<std::pair<std::string, std::string>> transitions;
};

struct Task {
    std::string name;
    std::vector<Segment> segments;
    TaskFsm fsm;
    std::int64_t period = 0;    // also the deadline
    std::int64_t priority = 0;  // higher number = higher priority
    std::string affinity;
};

struct RtsSpec {
    std::string time_unit = "tu";  // informative only
    std::vector<std::string> cores;
    std::vector<Task> tasks;
};

std::vector<Diagnostic> validate_rts(const RtsSpec& r);

// lcm of the periods on the core; requires a validated spec.
std::int64_t hyperperiod(const RtsSpec& r, const std::string& core);

std::vector<Task> partition_of(const RtsSpec& r, const std::string& core);

// All maximal act->end paths as ordered segment sequences, lexicographic by
// segment declaration order (end is visited after segment successors).
std::vector<std::vector<std::string>> enumerate_jobs(const Task& t);

// Per-core generation context for one task.
struct CoreContext {
    std::string core;
    std::int64_t task_id = 0;  // position within the partition
    bool preemptible = false;  // some higher-priority task shares the core
};

TimedAutomaton generate_task_ta(const Task& t, const CoreContext& ctx);
TimedAutomaton generate_scheduler_ta(const std::string& core, const std::vector<Task>& partition);

// N_c = H_c || TA_tau for all tasks of the partition, plus the core's
// channels and scheduler state.
Network build_core_network(const RtsSpec& r, const std::string& core);

// ── Schedulability ──────────────────────────────────────────────────────────

struct WcrtEntry {
    std::string task;
    std::int64_t wcrt = 0;
    std::int64_t period = 0;
    bool ok = false;
};

struct WcrtReport {
    std::vector<WcrtEntry> tasks;
    bool schedulable = false;
    ExploreStats stats;
};

// Explores N_c || Ref(hp_c) once and reads each task's worst-case response
// time as sup of its activation clock over its end location. One hyperperiod
// suffices: behaviors repeat at hp_c.
WcrtReport check_schedulability(const RtsSpec& r, const std::string& core,
                                std::uint64_t state_budget = 50'000'000);

// ── Input format ────────────────────────────────────────────────────────────

RtsSpec rts_from_json(const std::string& text);
std::string rts_to_json(const RtsSpec& r);

// Channel and variable naming shared by the generators and queries.
std::string ins_channel(const std::string& core);
std::string cmp_channel(const std::string& core);
std::string ter_channel(const std::string& core);
std::string pre_channel(const std::string& core);
std::string exe_channel(const std::string& core);
std::string rel_channel(const std::string& core, const std::string& task);
std::string queue_var(const std::string& core);
std::string running_var(const std::string& core);
std::string task_automaton(const std::string& task);
std::string scheduler_automaton(const std::string& core);

}  // namespace intercore

#endif  // INTERCORE_RTS_HPP
