#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "vodsim/catalog.hpp"
#include "vodsim/rng.hpp"

namespace vodsim {

// Resident object plus the bookkeeping every policy draws on.
struct CacheEntry {
    uint64_t video_id = 0;
    uint64_t size_bytes = 0;
    int64_t admit_time_ms = 0; // start of the staying time
    int64_t t_ref_ms = 0;      // previous reference
    int64_t t_cur_ms = 0;      // most recent reference
    uint32_t freq_count = 0;   // references while resident, 1 at admission
    double stored_key = 0.0;   // the policy's retained score
    std::vector<int64_t> access_times_ms; // recent accesses, bounded by the policy
};

enum class PolicyKind {
    RV,
    LRU,
    LFU,
    LFU_AGING,
    LFUDA,
    FIFO,
    RAND,
    GDS,
    GDS_AGING, // frequency-weighted GreedyDual key (a.k.a. GDSF)
    LRU_K,
};

const char* policy_name(PolicyKind kind);
PolicyKind parse_policy_kind(const std::string& name); // throws ConfigError

struct RvParams {
    double alpha = 0.77;     // Zipf-like exponent inside Pv
    double b = 1.0;          // size-weight exponent
    double k_bytes = 1e6;    // cost numerator constant
    int64_t epsilon_ms = 1;  // Age denominator clamp
};

struct LruKParams {
    uint32_t k = 2;
    int64_t rp_ms = 3'600'000; // retained-information period for ghost records
};

struct LfuAgingParams {
    uint32_t max_count = 255;
    uint64_t interval_events = 10'000; // halve all counts this often
};

struct GdsParams {
    double k_bytes = 1e6; // same cost model as RV: Cs + k/Bs
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::RV;
    RvParams rv;
    LruKParams lru_k;
    LfuAgingParams lfu_aging;
    GdsParams gds;
    uint64_t rand_seed = 0; // RAND's private stream

    std::vector<std::string> validate() const;
};

// Empirical popularity statistics over the full request stream.
// v(i) is the number of distinct videos requested at least i times so far;
// v(i) is non-increasing in i by construction.
class PopularityEstimator {
public:
    void record(uint64_t video_id);

    uint64_t requests() const { return requests_; }
    uint32_t count(uint64_t video_id) const;
    uint64_t v(uint32_t i) const;  // V_i; 0 for i == 0 or beyond support
    uint32_t support() const;      // largest i with V_i > 0

    // V_{i+1}/V_i when V_i > 0, else the optimistic prior 1/(1 + support).
    double reaccess_fraction(uint32_t i) const;

private:
    std::unordered_map<uint64_t, uint32_t> counts_;
    std::vector<uint64_t> at_least_; // at_least_[i-1] = V_i
    uint64_t requests_ = 0;
};

// --- RV scoring pieces ---

// (now - admit) / max(t_cur - t_ref, epsilon); callers pass 0 at admission.
double age(const CacheEntry& entry, int64_t now_ms, int64_t epsilon_ms);

// Cs + k / Bs, in seconds.
double transfer_cost(const ServerProfile& server, double k_bytes);

// p^{1/alpha} / max(log10(size), 1)^b with p = V_{i+1}/V_i at i = video_freq.
double reaccess_probability(const PopularityEstimator& est, uint32_t video_freq,
                            uint64_t size_bytes, const RvParams& params);

// Age + (cost/Size) * Pv; Age is 0 at admission.
double rank_value(const CacheEntry& entry, const ServerProfile& server,
                  const PopularityEstimator& est, int64_t now_ms, const RvParams& params,
                  bool at_admission);

// Everything a policy may consult when scoring an entry.
struct PolicyContext {
    const CatalogIndex* catalog = nullptr;
    const PopularityEstimator* estimator = nullptr;
    int64_t now_ms = 0;

    const ServerProfile& server_of(const CacheEntry& e) const;
};

// Scores are comparable doubles where lower = better eviction victim. The
// cache breaks ties by least-recent access, then video id.
class ReplacementPolicy {
public:
    virtual ~ReplacementPolicy() = default;

    virtual PolicyKind kind() const = 0;

    // Key stored when the entry enters the cache (freq_count == 1, Age == 0).
    virtual double admit_score(const CacheEntry& entry, const PolicyContext& ctx) = 0;

    // Refreshed key after a hit; entry metadata is already updated.
    virtual double hit_score(const CacheEntry& entry, const PolicyContext& ctx) = 0;

    // Victim was just removed from the cache.
    virtual void on_evict(const CacheEntry& entry, const PolicyContext& ctx);

    // Called once per processed request, before lookup/admit. Returns true
    // when every stored key became stale (LFU-Aging halving) and the cache
    // must rescore all residents via rescore().
    virtual bool on_request(const PolicyContext& ctx);
    virtual double rescore(const CacheEntry& entry, const PolicyContext& ctx);

    // May seed entry.access_times_ms before admit_score runs (LRU-K ghosts).
    virtual void on_admit(CacheEntry& entry, const PolicyContext& ctx);

    // How many recent access timestamps each entry keeps.
    virtual uint32_t history_cap() const;

    // RAND draws fresh per-entry scores each eviction round.
    virtual bool randomize_per_round() const;
    virtual double random_draw();

    // Global aging value, where the policy has one (GDS/GDSF inflation L,
    // LFUDA cache age). Exposed for invariant checks and logs.
    virtual double global_aging() const;
};

std::unique_ptr<ReplacementPolicy> make_policy(const PolicyConfig& config);

} // namespace vodsim
