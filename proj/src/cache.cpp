#include "vodsim/cache.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

#include "vodsim/errors.hpp"

namespace vodsim {

Cache::Cache(uint64_t capacity_bytes, ReplacementPolicy& policy)
    : capacity_(capacity_bytes), policy_(&policy)
{
    if (capacity_ < 1)
        throw ConfigError("cache capacity must be >= 1 byte");
}

void Cache::on_request(const PolicyContext& ctx)
{
    if (!policy_->on_request(ctx))
        return;
    index_.clear();
    for (auto& [id, e] : entries_) {
        e.stored_key = policy_->rescore(e, ctx);
        index_.insert(key_of(e));
    }
}

void Cache::push_access(CacheEntry& e, int64_t now_ms) const
{
    e.access_times_ms.push_back(now_ms);
    const uint32_t cap = std::max<uint32_t>(1, policy_->history_cap());
    if (e.access_times_ms.size() > cap)
        e.access_times_ms.erase(e.access_times_ms.begin(),
                                e.access_times_ms.begin() +
                                    static_cast<ptrdiff_t>(e.access_times_ms.size() - cap));
}

bool Cache::lookup(uint64_t video_id, int64_t now_ms, const PolicyContext& ctx)
{
    auto it = entries_.find(video_id);
    if (it == entries_.end())
        return false;

    CacheEntry& e = it->second;
    index_.erase(key_of(e));
    e.t_ref_ms = e.t_cur_ms;
    e.t_cur_ms = now_ms;
    e.freq_count += 1;
    push_access(e, now_ms);
    e.stored_key = policy_->hit_score(e, ctx);
    index_.insert(key_of(e));
    return true;
}

uint64_t Cache::pick_random_victim()
{
    // Fresh per-entry draws each round; walking the index keeps the draw
    // order (and so the whole run) deterministic.
    double best_draw = std::numeric_limits<double>::infinity();
    uint64_t victim = 0;
    for (const auto& key : index_) {
        const double draw = policy_->random_draw();
        if (draw < best_draw) {
            best_draw = draw;
            victim = key.video_id;
        }
    }
    return victim;
}

void Cache::evict_one(const PolicyContext& ctx, std::vector<uint64_t>& evicted)
{
    assert(!index_.empty());
    uint64_t victim_id;
    if (policy_->randomize_per_round())
        victim_id = pick_random_victim();
    else
        victim_id = index_.begin()->video_id;

    auto it = entries_.find(victim_id);
    CacheEntry& victim = it->second;
    if (observer_)
        observer_(*this, victim, victim.stored_key);
    policy_->on_evict(victim, ctx);
    used_ -= victim.size_bytes;
    index_.erase(key_of(victim));
    evicted.push_back(victim_id);
    entries_.erase(it);
}

AdmitOutcome Cache::admit(const VideoMeta& video, int64_t now_ms, const PolicyContext& ctx)
{
    AdmitOutcome out;
    if (video.size_bytes > capacity_)
        return out; // non-cacheable: bypass, never flush the cache for it

    while (used_ + video.size_bytes > capacity_)
        evict_one(ctx, out.evicted);

    CacheEntry e;
    e.video_id = video.video_id;
    e.size_bytes = video.size_bytes;
    e.admit_time_ms = e.t_ref_ms = e.t_cur_ms = now_ms;
    e.freq_count = 1;
    push_access(e, now_ms);
    policy_->on_admit(e, ctx);
    e.stored_key = policy_->admit_score(e, ctx);

    used_ += e.size_bytes;
    auto [it, inserted] = entries_.emplace(e.video_id, std::move(e));
    assert(inserted);
    index_.insert(key_of(it->second));
    out.admitted = true;
    return out;
}

bool Cache::contains(uint64_t video_id) const
{
    return entries_.find(video_id) != entries_.end();
}

const CacheEntry* Cache::peek(uint64_t video_id) const
{
    auto it = entries_.find(video_id);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::pair<uint64_t, double>> Cache::resident_set() const
{
    std::vector<std::pair<uint64_t, double>> out;
    out.reserve(entries_.size());
    for (const auto& [id, e] : entries_)
        out.emplace_back(id, e.stored_key);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace vodsim
