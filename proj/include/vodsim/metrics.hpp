#pragma once

#include <cstdint>
#include <vector>

#include "vodsim/catalog.hpp"

namespace vodsim {

enum class EventOutcome {
    Hit,          // served from cache
    Miss,         // cacheable miss: whole object fetched and stored
    NonCacheable, // object larger than the cache: bytes fetched, nothing stored
};

struct SimReport {
    uint64_t requests = 0;
    uint64_t hits = 0;
    double hit_ratio = 0.0;
    uint64_t bytes_requested = 0;
    uint64_t bytes_from_server = 0;
    double byte_volume_ratio = 0.0; // from-server / requested; can exceed 1
    double byte_hit_ratio = 0.0;    // 1 - byte_volume_ratio, floored at 0
    double latency_mean_s = 0.0;
    double latency_p50_s = 0.0;
    double latency_p95_s = 0.0;
    uint64_t evictions = 0;
    uint64_t non_cacheable = 0;
    bool empty = true;

    bool operator==(const SimReport&) const = default;
};

class MetricsAccumulator {
public:
    explicit MetricsAccumulator(double hit_latency_s = 0.0) : hit_latency_s_(hit_latency_s) {}

    // Hit: latency = hit_latency. Miss: full object fetched, latency
    // Cs + size/Bs. Non-cacheable: only the requested bytes flow, latency
    // Cs + bytes/Bs. bytes_requested accumulates in every case.
    void record_event(EventOutcome outcome, const VideoMeta& video, uint64_t bytes_requested,
                      const ServerProfile& server);

    void count_evictions(uint64_t n) { evictions_ += n; }

    // Ratios, nearest-rank percentiles; all-zero report with empty=true when
    // nothing was recorded.
    SimReport finalize() const;

    // Field-wise sum plus latency-sample concatenation (parallel sweep cells).
    void merge(const MetricsAccumulator& other);

private:
    double hit_latency_s_;
    uint64_t requests_ = 0;
    uint64_t hits_ = 0;
    uint64_t bytes_requested_ = 0;
    uint64_t bytes_from_server_ = 0;
    uint64_t evictions_ = 0;
    uint64_t non_cacheable_ = 0;
    std::vector<double> latency_s_;
};

} // namespace vodsim
