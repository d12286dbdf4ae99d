#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vodsim/cache.hpp"
#include "vodsim/config.hpp"
#include "vodsim/metrics.hpp"

namespace vodsim {

// One simulation cell: the report plus enough run context to label CSV rows
// and to prove that compared runs replayed the same trace.
struct RunResult {
    SimReport report;
    std::string policy;
    uint64_t seed = 0;
    uint64_t capacity_bytes = 0;
    double capacity_fraction = 0.0; // 0 when capacity was given in bytes
    double alpha = 0.0;             // workload echo (0 when trace was loaded)
    double lambda = 0.0;
    uint64_t trace_hash = 0;
    bool ok = true;
    std::string error;
};

// Materializes catalog and trace, replays every event in timestamp order
// through estimator -> lookup -> admit, and finalizes the metrics.
// Deterministic per config.
RunResult run_simulation(const SimConfig& config);

// Pre-materialized variant used by sweeps and tests so several policies can
// replay one identical trace.
RunResult run_simulation(const SimConfig& config, const Catalog& catalog, const Trace& trace);

// Observation points for logs and invariant audits.
struct RunHooks {
    Cache::EvictionObserver eviction; // fires just before each victim is removed
    std::function<void(size_t event_index, const TraceEvent& event, EventOutcome outcome,
                       const Cache& cache, const ReplacementPolicy& policy)>
        after_event;
};

RunResult run_simulation(const SimConfig& config, const Catalog& catalog, const Trace& trace,
                         const RunHooks& hooks);

// Build the run's inputs from paths or generation specs.
Catalog materialize_catalog(const SimConfig& config);
Trace materialize_trace(const SimConfig& config, const Catalog& catalog);
uint64_t resolve_capacity(const CapacitySpec& capacity, const Catalog& catalog);

enum class SweepAxis { CapacityFraction, Alpha, Lambda, Policy };

SweepAxis parse_sweep_axis(const std::string& name); // throws ConfigError
const char* sweep_axis_name(SweepAxis axis);

// One run per value; when `policies` is non-empty and the axis is numeric the
// sweep is the cross product. A failing cell is marked ok=false and does not
// abort the sweep. jobs > 1 runs cells concurrently (results identical).
std::vector<RunResult> run_sweep(const SimConfig& base, SweepAxis axis,
                                 const std::vector<double>& values,
                                 const std::vector<PolicyKind>& policies = {}, int jobs = 1);

struct ComparisonRow {
    std::string policy;
    double hit_ratio = 0.0;
    double delta_hit_ratio = 0.0;
    double byte_hit_ratio = 0.0;
    double delta_byte_hit_ratio = 0.0;
    double latency_mean_s = 0.0;
    double delta_latency_mean_s = 0.0;
};

struct ComparisonTable {
    std::string baseline;
    std::vector<ComparisonRow> rows;
};

// Metric deltas of each run against the named baseline run. All runs must
// carry the same trace fingerprint (throws ValidationError otherwise).
ComparisonTable compare(const std::vector<RunResult>& results, const std::string& baseline_policy);

// --- report emission ---

// Stable column order; see README for the schema.
std::string report_csv_header();
std::string report_csv_row(const RunResult& r);
void write_report_csv(const RunResult& r, const std::string& path);

std::string report_json(const RunResult& r, const SimConfig& config);
void write_report_json(const RunResult& r, const SimConfig& config, const std::string& path);
RunResult load_report_json(const std::string& path);

void write_sweep_csv(const std::vector<RunResult>& results, SweepAxis axis,
                     const std::string& path);

std::string comparison_csv(const ComparisonTable& table);
std::string comparison_text(const ComparisonTable& table);

// Derived bucket count for a request budget (at least 1).
uint64_t buckets_for_target_requests(const ArrivalModel& arrival, uint64_t target_requests);

// Applies config.out_dir (or $VODSIM_OUT_DIR) to a relative output path.
std::string resolve_output_path(const SimConfig& config, const std::string& path);

} // namespace vodsim
