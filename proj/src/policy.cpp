#include "vodsim/policy.hpp"

#include <algorithm>
#include <cmath>

#include "vodsim/errors.hpp"

namespace vodsim {

const char* policy_name(PolicyKind kind)
{
    switch (kind) {
    case PolicyKind::RV: return "rv";
    case PolicyKind::LRU: return "lru";
    case PolicyKind::LFU: return "lfu";
    case PolicyKind::LFU_AGING: return "lfu_aging";
    case PolicyKind::LFUDA: return "lfuda";
    case PolicyKind::FIFO: return "fifo";
    case PolicyKind::RAND: return "rand";
    case PolicyKind::GDS: return "gds";
    case PolicyKind::GDS_AGING: return "gds_aging";
    case PolicyKind::LRU_K: return "lru_k";
    }
    return "?";
}

PolicyKind parse_policy_kind(const std::string& name)
{
    std::string n;
    n.reserve(name.size());
    for (char c : name)
        n.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(c)));
    if (n == "rv") return PolicyKind::RV;
    if (n == "lru") return PolicyKind::LRU;
    if (n == "lfu") return PolicyKind::LFU;
    if (n == "lfu_aging") return PolicyKind::LFU_AGING;
    if (n == "lfuda") return PolicyKind::LFUDA;
    if (n == "fifo") return PolicyKind::FIFO;
    if (n == "rand" || n == "random") return PolicyKind::RAND;
    if (n == "gds") return PolicyKind::GDS;
    if (n == "gds_aging" || n == "gdsf" || n == "gds_f") return PolicyKind::GDS_AGING;
    if (n == "lru_k" || n == "lruk") return PolicyKind::LRU_K;
    throw ConfigError("unknown policy '" + name + "'");
}

std::vector<std::string> PolicyConfig::validate() const
{
    std::vector<std::string> problems;
    switch (kind) {
    case PolicyKind::RV:
        if (!(rv.alpha > 0.0))
            problems.push_back("policy.rv: alpha must be > 0");
        if (rv.epsilon_ms < 1)
            problems.push_back("policy.rv: epsilon_ms must be >= 1");
        if (!(rv.k_bytes > 0.0))
            problems.push_back("policy.rv: k_bytes must be > 0");
        break;
    case PolicyKind::LRU_K:
        if (lru_k.k < 1)
            problems.push_back("policy.lru_k: k must be >= 1");
        if (lru_k.rp_ms < 1)
            problems.push_back("policy.lru_k: rp_ms must be >= 1");
        break;
    case PolicyKind::LFU_AGING:
        if (lfu_aging.max_count < 1)
            problems.push_back("policy.lfu_aging: max_count must be >= 1");
        if (lfu_aging.interval_events < 1)
            problems.push_back("policy.lfu_aging: interval_events must be >= 1");
        break;
    case PolicyKind::GDS:
    case PolicyKind::GDS_AGING:
        if (!(gds.k_bytes > 0.0))
            problems.push_back("policy.gds: k_bytes must be > 0");
        break;
    default:
        break;
    }
    return problems;
}

// --- PopularityEstimator ---

void PopularityEstimator::record(uint64_t video_id)
{
    ++requests_;
    uint32_t& c = counts_[video_id];
    ++c;
    if (at_least_.size() < c)
        at_least_.resize(c, 0);
    ++at_least_[c - 1]; // one more video has been requested at least c times
}

uint32_t PopularityEstimator::count(uint64_t video_id) const
{
    auto it = counts_.find(video_id);
    return it == counts_.end() ? 0 : it->second;
}

uint64_t PopularityEstimator::v(uint32_t i) const
{
    if (i == 0 || i > at_least_.size())
        return 0;
    return at_least_[i - 1];
}

uint32_t PopularityEstimator::support() const
{
    return static_cast<uint32_t>(at_least_.size());
}

double PopularityEstimator::reaccess_fraction(uint32_t i) const
{
    const uint64_t vi = v(i);
    if (vi == 0)
        return 1.0 / (1.0 + static_cast<double>(support()));
    return static_cast<double>(v(i + 1)) / static_cast<double>(vi);
}

// --- RV scoring pieces ---

double age(const CacheEntry& entry, int64_t now_ms, int64_t epsilon_ms)
{
    const int64_t stay = now_ms - entry.admit_time_ms;
    const int64_t gap = std::max(entry.t_cur_ms - entry.t_ref_ms, epsilon_ms);
    return static_cast<double>(stay) / static_cast<double>(gap);
}

double transfer_cost(const ServerProfile& server, double k_bytes)
{
    return server.connect_time_s + k_bytes / server.bandwidth_Bps;
}

double reaccess_probability(const PopularityEstimator& est, uint32_t video_freq,
                            uint64_t size_bytes, const RvParams& params)
{
    const double p = est.reaccess_fraction(video_freq);
    const double size_term = std::max(std::log10(static_cast<double>(size_bytes)), 1.0);
    return std::pow(p, 1.0 / params.alpha) / std::pow(size_term, params.b);
}

double rank_value(const CacheEntry& entry, const ServerProfile& server,
                  const PopularityEstimator& est, int64_t now_ms, const RvParams& params,
                  bool at_admission)
{
    const double age_term = at_admission ? 0.0 : age(entry, now_ms, params.epsilon_ms);
    const double cost = transfer_cost(server, params.k_bytes);
    const double pv = reaccess_probability(est, entry.freq_count, entry.size_bytes, params);
    return age_term + (cost / static_cast<double>(entry.size_bytes)) * pv;
}

const ServerProfile& PolicyContext::server_of(const CacheEntry& e) const
{
    return catalog->server_of(e.video_id);
}

// --- ReplacementPolicy defaults ---

void ReplacementPolicy::on_evict(const CacheEntry&, const PolicyContext&) {}
bool ReplacementPolicy::on_request(const PolicyContext&) { return false; }
double ReplacementPolicy::rescore(const CacheEntry& entry, const PolicyContext&)
{
    return entry.stored_key;
}
void ReplacementPolicy::on_admit(CacheEntry&, const PolicyContext&) {}
uint32_t ReplacementPolicy::history_cap() const { return 1; }
bool ReplacementPolicy::randomize_per_round() const { return false; }
double ReplacementPolicy::random_draw() { return 0.0; }
double ReplacementPolicy::global_aging() const { return 0.0; }

namespace {

class RvPolicy final : public ReplacementPolicy {
public:
    explicit RvPolicy(const RvParams& p) : params_(p) {}
    PolicyKind kind() const override { return PolicyKind::RV; }

    double admit_score(const CacheEntry& e, const PolicyContext& ctx) override
    {
        return rank_value(e, ctx.server_of(e), *ctx.estimator, ctx.now_ms, params_, true);
    }
    double hit_score(const CacheEntry& e, const PolicyContext& ctx) override
    {
        return rank_value(e, ctx.server_of(e), *ctx.estimator, ctx.now_ms, params_, false);
    }

private:
    RvParams params_;
};

class LruPolicy final : public ReplacementPolicy {
public:
    PolicyKind kind() const override { return PolicyKind::LRU; }
    double admit_score(const CacheEntry& e, const PolicyContext&) override
    {
        return static_cast<double>(e.t_cur_ms);
    }
    double hit_score(const CacheEntry& e, const PolicyContext&) override
    {
        return static_cast<double>(e.t_cur_ms);
    }
};

class LfuPolicy final : public ReplacementPolicy {
public:
    PolicyKind kind() const override { return PolicyKind::LFU; }
    double admit_score(const CacheEntry& e, const PolicyContext&) override
    {
        return static_cast<double>(e.freq_count);
    }
    double hit_score(const CacheEntry& e, const PolicyContext&) override
    {
        return static_cast<double>(e.freq_count);
    }
};

// LFU with capped counts that are halved every interval_events requests.
class LfuAgingPolicy final : public ReplacementPolicy {
public:
    explicit LfuAgingPolicy(const LfuAgingParams& p) : params_(p) {}
    PolicyKind kind() const override { return PolicyKind::LFU_AGING; }

    double admit_score(const CacheEntry& e, const PolicyContext&) override
    {
        counts_[e.video_id] = 1;
        return 1.0;
    }
    double hit_score(const CacheEntry& e, const PolicyContext&) override
    {
        uint32_t& c = counts_[e.video_id];
        c = std::min(c + 1, params_.max_count);
        return static_cast<double>(c);
    }
    void on_evict(const CacheEntry& e, const PolicyContext&) override
    {
        counts_.erase(e.video_id);
    }
    bool on_request(const PolicyContext&) override
    {
        if (++events_ % params_.interval_events != 0)
            return false;
        for (auto& [id, c] : counts_)
            c /= 2;
        return true; // every stored key is stale now
    }
    double rescore(const CacheEntry& e, const PolicyContext&) override
    {
        return static_cast<double>(counts_[e.video_id]);
    }
    uint32_t aged_count(uint64_t video_id) const
    {
        auto it = counts_.find(video_id);
        return it == counts_.end() ? 0 : it->second;
    }

private:
    LfuAgingParams params_;
    std::unordered_map<uint64_t, uint32_t> counts_;
    uint64_t events_ = 0;
};

// Reference count plus a cache age that jumps to the victim's key on every
// eviction, so long-idle high-count entries eventually lose.
class LfudaPolicy final : public ReplacementPolicy {
public:
    PolicyKind kind() const override { return PolicyKind::LFUDA; }
    double admit_score(const CacheEntry& e, const PolicyContext&) override
    {
        return static_cast<double>(e.freq_count) + cache_age_;
    }
    double hit_score(const CacheEntry& e, const PolicyContext&) override
    {
        return static_cast<double>(e.freq_count) + cache_age_;
    }
    void on_evict(const CacheEntry& e, const PolicyContext&) override
    {
        cache_age_ = e.stored_key;
    }
    double global_aging() const override { return cache_age_; }

private:
    double cache_age_ = 0.0;
};

class FifoPolicy final : public ReplacementPolicy {
public:
    PolicyKind kind() const override { return PolicyKind::FIFO; }
    double admit_score(const CacheEntry& e, const PolicyContext&) override
    {
        return static_cast<double>(e.admit_time_ms);
    }
    double hit_score(const CacheEntry& e, const PolicyContext&) override
    {
        return e.stored_key; // position in the queue does not change on hit
    }
};

class RandPolicy final : public ReplacementPolicy {
public:
    explicit RandPolicy(uint64_t seed) : rng_(mix_seed(seed, seed_stream::rand_policy)) {}
    PolicyKind kind() const override { return PolicyKind::RAND; }
    double admit_score(const CacheEntry&, const PolicyContext&) override { return 0.0; }
    double hit_score(const CacheEntry&, const PolicyContext&) override { return 0.0; }
    bool randomize_per_round() const override { return true; }
    double random_draw() override { return rng_.next_double(); }

private:
    Rng rng_;
};

// GreedyDual-Size: H = L + cost/size, with the inflation value L raised to
// the victim's H on every eviction. The frequency-weighted variant
// (gds_aging/GDSF) uses H = L + freq * cost/size.
class GdsPolicy final : public ReplacementPolicy {
public:
    GdsPolicy(const GdsParams& p, bool freq_weighted)
        : params_(p), freq_weighted_(freq_weighted)
    {
    }
    PolicyKind kind() const override
    {
        return freq_weighted_ ? PolicyKind::GDS_AGING : PolicyKind::GDS;
    }
    double admit_score(const CacheEntry& e, const PolicyContext& ctx) override
    {
        return inflation_ + value_term(e, ctx);
    }
    double hit_score(const CacheEntry& e, const PolicyContext& ctx) override
    {
        return inflation_ + value_term(e, ctx);
    }
    void on_evict(const CacheEntry& e, const PolicyContext&) override
    {
        inflation_ = e.stored_key;
    }
    double global_aging() const override { return inflation_; }

private:
    double value_term(const CacheEntry& e, const PolicyContext& ctx) const
    {
        const double cost = transfer_cost(ctx.server_of(e), params_.k_bytes);
        const double weight = freq_weighted_ ? static_cast<double>(e.freq_count) : 1.0;
        return weight * cost / static_cast<double>(e.size_bytes);
    }

    GdsParams params_;
    bool freq_weighted_;
    double inflation_ = 0.0; // L
};

// Entries with a full K-deep history rank above all partial-history entries
// (offset keeps both groups ordered and exactly representable in a double);
// within a group older timestamps lose first. Access histories of evicted
// entries are kept for rp_ms and resumed if the video returns in time.
class LruKPolicy final : public ReplacementPolicy {
public:
    explicit LruKPolicy(const LruKParams& p) : params_(p) {}
    PolicyKind kind() const override { return PolicyKind::LRU_K; }

    double admit_score(const CacheEntry& e, const PolicyContext&) override { return score(e); }
    double hit_score(const CacheEntry& e, const PolicyContext&) override { return score(e); }
    uint32_t history_cap() const override { return params_.k; }

    void on_admit(CacheEntry& e, const PolicyContext& ctx) override
    {
        auto it = ghosts_.find(e.video_id);
        if (it == ghosts_.end())
            return;
        if (ctx.now_ms - it->second.evicted_ms <= params_.rp_ms) {
            // resume the pre-eviction history in front of the admitting access
            std::vector<int64_t> merged = it->second.times_ms;
            merged.insert(merged.end(), e.access_times_ms.begin(), e.access_times_ms.end());
            if (merged.size() > params_.k)
                merged.erase(merged.begin(),
                             merged.begin() + static_cast<ptrdiff_t>(merged.size() - params_.k));
            e.access_times_ms = std::move(merged);
        }
        ghosts_.erase(it);
    }

    void on_evict(const CacheEntry& e, const PolicyContext& ctx) override
    {
        ghosts_[e.video_id] = Ghost{e.access_times_ms, ctx.now_ms};
    }

    bool on_request(const PolicyContext& ctx) override
    {
        if (++events_ % kSweepInterval == 0)
            prune_ghosts(ctx.now_ms);
        return false;
    }

    size_t ghost_count() const { return ghosts_.size(); }

private:
    static constexpr uint64_t kSweepInterval = 4096;
    // Above any realistic millisecond timestamp, and small enough that
    // offset + t stays exactly representable.
    static constexpr double kFullHistoryOffset = 0x1p50;

    struct Ghost {
        std::vector<int64_t> times_ms;
        int64_t evicted_ms = 0;
    };

    double score(const CacheEntry& e) const
    {
        if (e.access_times_ms.size() >= params_.k)
            return kFullHistoryOffset + static_cast<double>(e.access_times_ms.front());
        return static_cast<double>(e.t_cur_ms);
    }

    void prune_ghosts(int64_t now_ms)
    {
        for (auto it = ghosts_.begin(); it != ghosts_.end();) {
            if (now_ms - it->second.evicted_ms > params_.rp_ms)
                it = ghosts_.erase(it);
            else
                ++it;
        }
    }

    LruKParams params_;
    std::unordered_map<uint64_t, Ghost> ghosts_;
    uint64_t events_ = 0;
};

} // namespace

std::unique_ptr<ReplacementPolicy> make_policy(const PolicyConfig& config)
{
    auto problems = config.validate();
    if (!problems.empty())
        throw ConfigError("invalid policy config: " + problems.front());

    switch (config.kind) {
    case PolicyKind::RV: return std::make_unique<RvPolicy>(config.rv);
    case PolicyKind::LRU: return std::make_unique<LruPolicy>();
    case PolicyKind::LFU: return std::make_unique<LfuPolicy>();
    case PolicyKind::LFU_AGING: return std::make_unique<LfuAgingPolicy>(config.lfu_aging);
    case PolicyKind::LFUDA: return std::make_unique<LfudaPolicy>();
    case PolicyKind::FIFO: return std::make_unique<FifoPolicy>();
    case PolicyKind::RAND: return std::make_unique<RandPolicy>(config.rand_seed);
    case PolicyKind::GDS: return std::make_unique<GdsPolicy>(config.gds, false);
    case PolicyKind::GDS_AGING: return std::make_unique<GdsPolicy>(config.gds, true);
    case PolicyKind::LRU_K: return std::make_unique<LruKPolicy>(config.lru_k);
    }
    throw ConfigError("unknown policy kind");
}

} // namespace vodsim
