#ifndef INTERCORE_PIPELINE_HPP
#define INTERCORE_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "intercore/abstraction.hpp"
#include "intercore/bounds.hpp"
#include "intercore/rts.hpp"

namespace intercore {

// Orchestration shared by the command-line tool and the python module:
// input parsing with cross-validation, per-core stages with a bounded worker
// pool, and the run manifest emitted next to generated artifacts.

std::string version_string();

struct PipelineOptions {
    std::uint64_t state_budget = 50'000'000;
    int jobs = 1;          // concurrent per-core explorations
    bool force = false;    // downgrade the job-coverage error
    bool coarse = false;   // per-period hulls instead of exact interval sets
    bool verbose = false;
    std::string xta_dir;   // when set, N_<core>.ta.json files are loaded
    std::ostream* log = nullptr;
};

struct StageInfo {
    std::string name;
    std::uint64_t states = 0;
    double wall_ms = 0;
};

struct RunManifest {
    std::string tool_version;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, fnv1a64 digest
    std::vector<StageInfo> stages;
    std::vector<std::string> warnings;

    void add_input(const std::string& path);
    std::string to_json() const;
};

struct LoadedInputs {
    RtsSpec rts;
    EventSpec events;
};

// Parses and validates rts.json; throws InputError carrying the first
// diagnostics when the spec is malformed.
RtsSpec parse_rts(const std::string& rts_path);

// Parses both inputs and applies event-spec validation. Errors abort unless
// force downgrades the job-coverage error, which is then recorded as a
// warning in the manifest (exactness becomes the caller's responsibility).
LoadedInputs parse_inputs(const std::string& rts_path, const std::string& events_path,
                          const PipelineOptions& opts, RunManifest* manifest);

Requirement parse_requirement(const std::string& req_path, const EventSpec& events);

// Interval extraction for every core of C_E, per-core runs dispatched to at
// most `jobs` workers; result order follows the rts core order regardless of
// completion order.
std::vector<IvTable> run_intervals(const RtsSpec& r, const EventSpec& e,
                                   const PipelineOptions& opts, RunManifest* manifest);

struct AbstractionArtifacts {
    std::vector<std::string> cores;
    std::vector<Network> core_networks;  // N_c, generated or loaded via xta
    std::vector<IvTable> tables;         // exact or coarsened
    std::vector<Network> abstractions;   // A_c with event channels
};

AbstractionArtifacts run_abstract(const RtsSpec& r, const EventSpec& e,
                                  const PipelineOptions& opts, RunManifest* manifest);

struct BoundRecord {
    bool satisfied = false;
    std::int64_t bound = 0;
    std::string unit;
    std::uint64_t states_explored = 0;
    double wall_time = 0;  // seconds

    std::string to_json_line() const;
};

BoundRecord run_bound(const RtsSpec& r, const EventSpec& e, const Requirement& req,
                      const PipelineOptions& opts, RunManifest* manifest);

std::string fnv1a64_digest(const std::string& bytes);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace intercore

#endif  // INTERCORE_PIPELINE_HPP
