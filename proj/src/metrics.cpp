#include "vodsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vodsim {

void MetricsAccumulator::record_event(EventOutcome outcome, const VideoMeta& video,
                                      uint64_t bytes_requested, const ServerProfile& server)
{
    ++requests_;
    bytes_requested_ += bytes_requested;
    switch (outcome) {
    case EventOutcome::Hit:
        ++hits_;
        latency_s_.push_back(hit_latency_s_);
        break;
    case EventOutcome::Miss:
        // whole-object fetch: the transfer pays for what gets stored
        bytes_from_server_ += video.size_bytes;
        latency_s_.push_back(server.connect_time_s +
                             static_cast<double>(video.size_bytes) / server.bandwidth_Bps);
        break;
    case EventOutcome::NonCacheable:
        ++non_cacheable_;
        bytes_from_server_ += bytes_requested;
        latency_s_.push_back(server.connect_time_s +
                             static_cast<double>(bytes_requested) / server.bandwidth_Bps);
        break;
    }
}

namespace {

double nearest_rank(const std::vector<double>& sorted, double p)
{
    const size_t n = sorted.size();
    size_t rank = static_cast<size_t>(std::ceil(p * static_cast<double>(n)));
    rank = std::clamp<size_t>(rank, 1, n);
    return sorted[rank - 1];
}

} // namespace

SimReport MetricsAccumulator::finalize() const
{
    SimReport r;
    r.requests = requests_;
    r.hits = hits_;
    r.bytes_requested = bytes_requested_;
    r.bytes_from_server = bytes_from_server_;
    r.evictions = evictions_;
    r.non_cacheable = non_cacheable_;
    r.empty = requests_ == 0;
    if (r.empty)
        return r;

    r.hit_ratio = static_cast<double>(hits_) / static_cast<double>(requests_);
    if (bytes_requested_ > 0) {
        r.byte_volume_ratio =
            static_cast<double>(bytes_from_server_) / static_cast<double>(bytes_requested_);
        r.byte_hit_ratio = std::max(0.0, 1.0 - r.byte_volume_ratio);
    }

    std::vector<double> sorted = latency_s_;
    std::sort(sorted.begin(), sorted.end());
    r.latency_mean_s = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                       static_cast<double>(sorted.size());
    r.latency_p50_s = nearest_rank(sorted, 0.50);
    r.latency_p95_s = nearest_rank(sorted, 0.95);
    return r;
}

void MetricsAccumulator::merge(const MetricsAccumulator& other)
{
    requests_ += other.requests_;
    hits_ += other.hits_;
    bytes_requested_ += other.bytes_requested_;
    bytes_from_server_ += other.bytes_from_server_;
    evictions_ += other.evictions_;
    non_cacheable_ += other.non_cacheable_;
    latency_s_.insert(latency_s_.end(), other.latency_s_.begin(), other.latency_s_.end());
}

} // namespace vodsim
