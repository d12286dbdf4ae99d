#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vodsim/catalog.hpp"
#include "vodsim/policy.hpp"
#include "vodsim/workload.hpp"

namespace vodsim {

struct CatalogSpec {
    std::optional<std::string> path;        // load from file
    std::optional<CatalogGenSpec> generate; // or generate from seed
};

struct TraceGenSpec {
    ArrivalModel arrival;
    double alpha = 0.77;
    bool shuffle_ranks = false;
    SessionModel session;
    // Exactly one: explicit bucket count, or a request budget from which the
    // bucket count is derived via the arrival model's mean.
    std::optional<uint64_t> num_buckets;
    std::optional<uint64_t> target_requests;
};

struct TraceSpec {
    std::optional<std::string> path;
    std::optional<TraceGenSpec> generate;
};

struct CapacitySpec {
    std::optional<uint64_t> bytes;
    std::optional<double> fraction; // of total catalog bytes, in (0, 1]
};

struct SimConfig {
    CatalogSpec catalog;
    TraceSpec trace;
    PolicyConfig policy;
    CapacitySpec capacity;
    uint64_t seed = 0;
    double hit_latency_s = 0.0;
    bool check_invariants = false; // per-event capacity/accounting audit
    std::string eviction_log_path; // empty: disabled
    std::string report_csv_path;
    std::string report_json_path;
    std::string out_dir; // prefix for relative output paths

    std::vector<std::string> validate() const;
};

// Parses a JSON config document. `"preset": "paper"` pre-fills the default
// evaluation setup (1000 videos / 4 servers, lambda=15, N=27, alpha=0.77,
// session model 0.70/20min, RV policy, 100k-request budget, 10% capacity)
// before the document's own keys are applied on top.
SimConfig load_config(const std::string& path);
SimConfig parse_config_json(const std::string& text, const std::string& origin);
SimConfig preset_config(const std::string& name); // "paper" or "none"

// The `light-to-heavy sweep` preset: lambda values 1..15 for the lambda axis.
std::vector<double> light_to_heavy_lambda_values();

} // namespace vodsim
