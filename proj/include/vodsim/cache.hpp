#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "vodsim/catalog.hpp"
#include "vodsim/policy.hpp"

namespace vodsim {

struct AdmitOutcome {
    bool admitted = false;            // false: object larger than the cache, bypassed
    std::vector<uint64_t> evicted;    // victims in eviction order
};

// Byte-capacity cache with whole-object admission. Victim selection walks an
// ordered index keyed by (stored score, last access, id), so each eviction is
// O(log n) and ties fall to the least recently used entry.
class Cache {
public:
    Cache(uint64_t capacity_bytes, ReplacementPolicy& policy);

    // Forwards the per-request tick to the policy; rescores all residents
    // when the policy says its keys went stale.
    void on_request(const PolicyContext& ctx);

    // On hit: t_ref <- old t_cur, t_cur <- now, freq_count += 1, access
    // history extended, stored key refreshed. On miss: no state change.
    bool lookup(uint64_t video_id, int64_t now_ms, const PolicyContext& ctx);

    // Evicts minimum-score entries one at a time until the object fits, then
    // inserts it with admit = t_ref = t_cur = now and freq_count = 1.
    AdmitOutcome admit(const VideoMeta& video, int64_t now_ms, const PolicyContext& ctx);

    bool contains(uint64_t video_id) const;
    const CacheEntry* peek(uint64_t video_id) const;

    // Snapshot of (video_id, stored_key) ordered by id; side-effect free.
    std::vector<std::pair<uint64_t, double>> resident_set() const;

    uint64_t capacity_bytes() const { return capacity_; }
    uint64_t used_bytes() const { return used_; }
    size_t entry_count() const { return entries_.size(); }

    // Invoked just before a victim is removed, while it is still resident;
    // used by the eviction log and by victim-minimality oracles.
    using EvictionObserver =
        std::function<void(const Cache&, const CacheEntry& victim, double score)>;
    void set_eviction_observer(EvictionObserver obs) { observer_ = std::move(obs); }

private:
    struct IndexKey {
        double score;
        int64_t t_cur_ms;
        uint64_t video_id;

        bool operator<(const IndexKey& o) const
        {
            if (score != o.score)
                return score < o.score;
            if (t_cur_ms != o.t_cur_ms)
                return t_cur_ms < o.t_cur_ms;
            return video_id < o.video_id;
        }
    };

    IndexKey key_of(const CacheEntry& e) const
    {
        return IndexKey{e.stored_key, e.t_cur_ms, e.video_id};
    }

    void evict_one(const PolicyContext& ctx, std::vector<uint64_t>& evicted);
    uint64_t pick_random_victim();
    void push_access(CacheEntry& e, int64_t now_ms) const;

    uint64_t capacity_;
    uint64_t used_ = 0;
    ReplacementPolicy* policy_;
    std::unordered_map<uint64_t, CacheEntry> entries_;
    std::set<IndexKey> index_;
    EvictionObserver observer_;
};

} // namespace vodsim
