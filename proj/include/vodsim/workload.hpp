#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vodsim/catalog.hpp"
#include "vodsim/rng.hpp"

namespace vodsim {

// Per-bucket request-count model: counts follow the reversed Poisson
// P(x) = e^{-lambda} lambda^{N-x} / (N-x)!, renormalized over x in [0, N].
struct ArrivalModel {
    double lambda = 15.0;
    uint32_t n_max = 27;   // N, hard cap on arrivals per bucket
    double bucket_s = 60.0;
};

std::vector<std::string> validate_arrival_model(const ArrivalModel& m);

// Total over all integers; 0 outside [0, n_max].
double modified_poisson_pmf(int64_t x, const ArrivalModel& m);

// Mean per-bucket count, N - E[truncated Poisson].
double expected_arrivals_per_bucket(const ArrivalModel& m);

// Draws y ~ Poisson(lambda), rejects y > N, returns x = N - y per bucket.
std::vector<uint32_t> sample_arrivals(const ArrivalModel& m, uint64_t num_buckets, Rng& rng);

// Zipf-like video selection: rank i drawn with probability i^-alpha / H_M(alpha),
// rank_to_id maps rank (1-based) to a catalog video id.
class SelectionModel {
public:
    SelectionModel(double alpha, std::vector<uint64_t> rank_to_id);

    // Ranks follow the catalog's videos in ascending id order; optionally
    // shuffled so popularity is decorrelated from id.
    static SelectionModel from_catalog(double alpha, const Catalog& c, bool shuffle_ranks,
                                       uint64_t seed);

    double alpha() const { return alpha_; }
    uint64_t m() const { return static_cast<uint64_t>(rank_to_id_.size()); }
    const std::vector<uint64_t>& rank_to_id() const { return rank_to_id_; }

    // Throws std::out_of_range unless 1 <= rank <= m().
    double pmf(uint64_t rank) const;

    uint64_t sample_rank(Rng& rng) const;
    uint64_t sample_video(Rng& rng) const;

private:
    double alpha_;
    std::vector<uint64_t> rank_to_id_;
    std::vector<double> cdf_; // cdf_[i] = P(rank <= i+1)
    double harmonic_ = 0.0;   // H_M(alpha)
};

double zipf_like_pmf(uint64_t rank, const SelectionModel& model);
uint64_t sample_video(const SelectionModel& model, Rng& rng);

// 70% of sessions quit inside the first 20 minutes; the rest run past the
// window (or to the end for short videos).
struct SessionModel {
    bool enabled = false;
    double early_quit_prob = 0.70;
    double early_window_s = 1200.0;
};

uint64_t sample_bytes(const VideoMeta& video, const SessionModel& session, Rng& rng);

struct TraceEvent {
    uint64_t timestamp_ms = 0;
    uint64_t video_id = 0;
    uint64_t bytes_requested = 0;

    bool operator==(const TraceEvent&) const = default;
};

struct Trace {
    std::vector<TraceEvent> events;
    std::string header; // provenance line from generation / file load

    bool operator==(const Trace&) const = default;
};

Trace generate_trace(const Catalog& catalog, const ArrivalModel& arrival,
                     const SelectionModel& selection, const SessionModel& session,
                     uint64_t num_buckets, uint64_t seed);

// Timestamp monotonicity, id referential integrity, byte bounds. Empty iff valid.
std::vector<std::string> validate_trace(const Trace& trace, const Catalog& catalog);

// One `timestamp_ms,video_id,bytes_requested` line per event plus a leading
// `#` provenance header.
void save_trace(const Trace& trace, const std::string& path);
Trace load_trace(const std::string& path);

// FNV-1a over the event stream; lets reports prove two runs saw one workload.
uint64_t trace_fingerprint(const Trace& trace);

} // namespace vodsim
