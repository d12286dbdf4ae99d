#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace vodsim {

struct VideoMeta {
    uint64_t video_id = 0;
    uint64_t size_bytes = 0; // whole-object size
    double duration_s = 0.0;
    uint32_t server_id = 0;

    bool operator==(const VideoMeta&) const = default;
};

struct ServerProfile {
    uint32_t server_id = 0;
    double connect_time_s = 0.0; // Cs
    double bandwidth_Bps = 0.0;  // Bs

    bool operator==(const ServerProfile&) const = default;
};

struct Catalog {
    std::vector<ServerProfile> servers;
    std::vector<VideoMeta> videos;

    bool operator==(const Catalog&) const = default;

    uint64_t total_bytes() const;
};

// Read-only id lookup built once per simulation; the catalog itself stays a
// plain immutable value.
class CatalogIndex {
public:
    explicit CatalogIndex(const Catalog& c);

    const VideoMeta* find_video(uint64_t video_id) const;
    const VideoMeta& video(uint64_t video_id) const;          // throws ValidationError
    const ServerProfile& server(uint32_t server_id) const;    // throws ValidationError
    const ServerProfile& server_of(uint64_t video_id) const;

private:
    std::unordered_map<uint64_t, const VideoMeta*> videos_;
    std::unordered_map<uint32_t, const ServerProfile*> servers_;
};

struct SizeDist {
    enum class Kind { Fixed, Uniform, LogUniform };
    Kind kind = Kind::LogUniform;
    double min_bytes = 10e6; // 10 MB
    double max_bytes = 2e9;  // 2 GB
};

struct ServerDist {
    double connect_min_s = 0.05;
    double connect_max_s = 2.0;
    double bandwidth_min_Bps = 1e6;  // 1 MB/s
    double bandwidth_max_Bps = 50e6; // 50 MB/s
};

struct CatalogGenSpec {
    uint32_t num_videos = 1000;
    uint32_t num_servers = 4;
    SizeDist size_dist;
    ServerDist server_dist;
    double bitrate_bps = 4e6; // duration = size * 8 / bitrate
};

// Deterministic per (spec, seed). Video ids are 1-based so popularity rank i
// maps to video_id i under the default identity rank mapping.
Catalog generate_catalog(const CatalogGenSpec& spec, uint64_t seed);

// Full invariant check; returns one message per violation, empty when valid.
std::vector<std::string> validate_catalog(const Catalog& c);

// JSON document with top-level `servers` and `videos` arrays; load(save(c))
// reproduces c field-for-field. load throws ParseError / ValidationError.
void save_catalog(const Catalog& c, const std::string& path);
Catalog load_catalog(const std::string& path);

} // namespace vodsim
