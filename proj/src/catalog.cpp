#include "vodsim/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "vodsim/errors.hpp"
#include "vodsim/rng.hpp"

namespace vodsim {

using nlohmann::json;

uint64_t Catalog::total_bytes() const
{
    uint64_t sum = 0;
    for (const auto& v : videos)
        sum += v.size_bytes;
    return sum;
}

CatalogIndex::CatalogIndex(const Catalog& c)
{
    videos_.reserve(c.videos.size());
    for (const auto& v : c.videos)
        videos_.emplace(v.video_id, &v);
    servers_.reserve(c.servers.size());
    for (const auto& s : c.servers)
        servers_.emplace(s.server_id, &s);
}

const VideoMeta* CatalogIndex::find_video(uint64_t video_id) const
{
    auto it = videos_.find(video_id);
    return it == videos_.end() ? nullptr : it->second;
}

const VideoMeta& CatalogIndex::video(uint64_t video_id) const
{
    const VideoMeta* v = find_video(video_id);
    if (v == nullptr)
        throw ValidationError("unknown video_id " + std::to_string(video_id));
    return *v;
}

const ServerProfile& CatalogIndex::server(uint32_t server_id) const
{
    auto it = servers_.find(server_id);
    if (it == servers_.end())
        throw ValidationError("unknown server_id " + std::to_string(server_id));
    return *it->second;
}

const ServerProfile& CatalogIndex::server_of(uint64_t video_id) const
{
    return server(video(video_id).server_id);
}

namespace {

uint64_t draw_size(const SizeDist& d, Rng& rng)
{
    double raw = 0.0;
    switch (d.kind) {
    case SizeDist::Kind::Fixed:
        raw = d.min_bytes;
        break;
    case SizeDist::Kind::Uniform:
        raw = rng.uniform(d.min_bytes, d.max_bytes);
        break;
    case SizeDist::Kind::LogUniform:
        raw = rng.log_uniform(d.min_bytes, d.max_bytes);
        break;
    }
    uint64_t bytes = static_cast<uint64_t>(std::llround(raw));
    return bytes == 0 ? 1 : bytes;
}

void check_gen_spec(const CatalogGenSpec& spec)
{
    if (spec.num_videos < 1)
        throw ConfigError("catalog: num_videos must be >= 1");
    if (spec.num_servers < 1)
        throw ConfigError("catalog: num_servers must be >= 1");
    if (spec.size_dist.min_bytes < 1.0)
        throw ConfigError("catalog: size_dist min must be >= 1 byte");
    if (spec.size_dist.kind != SizeDist::Kind::Fixed &&
        spec.size_dist.max_bytes < spec.size_dist.min_bytes)
        throw ConfigError("catalog: size_dist max must be >= min");
    if (spec.server_dist.connect_min_s < 0.0 ||
        spec.server_dist.connect_max_s < spec.server_dist.connect_min_s)
        throw ConfigError("catalog: connect time range invalid");
    if (spec.server_dist.bandwidth_min_Bps <= 0.0 ||
        spec.server_dist.bandwidth_max_Bps < spec.server_dist.bandwidth_min_Bps)
        throw ConfigError("catalog: bandwidth range invalid");
    if (spec.bitrate_bps <= 0.0)
        throw ConfigError("catalog: bitrate must be positive");
}

} // namespace

Catalog generate_catalog(const CatalogGenSpec& spec, uint64_t seed)
{
    check_gen_spec(spec);
    Rng rng(mix_seed(seed, seed_stream::catalog));

    Catalog c;
    c.servers.reserve(spec.num_servers);
    for (uint32_t s = 0; s < spec.num_servers; ++s) {
        ServerProfile p;
        p.server_id = s;
        // connect times can hit 0, which log_uniform cannot represent
        if (spec.server_dist.connect_min_s <= 0.0)
            p.connect_time_s = rng.uniform(spec.server_dist.connect_min_s,
                                           spec.server_dist.connect_max_s);
        else
            p.connect_time_s = rng.log_uniform(spec.server_dist.connect_min_s,
                                               spec.server_dist.connect_max_s);
        p.bandwidth_Bps = rng.log_uniform(spec.server_dist.bandwidth_min_Bps,
                                          spec.server_dist.bandwidth_max_Bps);
        c.servers.push_back(p);
    }

    c.videos.reserve(spec.num_videos);
    for (uint32_t i = 0; i < spec.num_videos; ++i) {
        VideoMeta v;
        v.video_id = i + 1; // rank 1 == id 1 under the identity rank map
        v.size_bytes = draw_size(spec.size_dist, rng);
        v.server_id = static_cast<uint32_t>(rng.uniform_index(spec.num_servers));
        v.duration_s = static_cast<double>(v.size_bytes) * 8.0 / spec.bitrate_bps;
        c.videos.push_back(v);
    }
    return c;
}

std::vector<std::string> validate_catalog(const Catalog& c)
{
    std::vector<std::string> problems;
    if (c.videos.empty())
        problems.push_back("catalog has no videos");
    if (c.servers.empty())
        problems.push_back("catalog has no servers");

    std::unordered_set<uint32_t> server_ids;
    for (const auto& s : c.servers) {
        if (!server_ids.insert(s.server_id).second)
            problems.push_back("duplicate server_id " + std::to_string(s.server_id));
        if (s.bandwidth_Bps <= 0.0)
            problems.push_back("server " + std::to_string(s.server_id) +
                               ": bandwidth_Bps must be > 0");
        if (s.connect_time_s < 0.0)
            problems.push_back("server " + std::to_string(s.server_id) +
                               ": connect_time_s must be >= 0");
    }

    std::unordered_set<uint64_t> video_ids;
    for (const auto& v : c.videos) {
        const std::string tag = "video " + std::to_string(v.video_id);
        if (!video_ids.insert(v.video_id).second)
            problems.push_back("duplicate video_id " + std::to_string(v.video_id));
        if (v.size_bytes < 1)
            problems.push_back(tag + ": size_bytes must be >= 1");
        if (!(v.duration_s > 0.0))
            problems.push_back(tag + ": duration_s must be > 0");
        if (server_ids.find(v.server_id) == server_ids.end())
            problems.push_back(tag + ": server_id " + std::to_string(v.server_id) +
                               " not in servers");
    }
    return problems;
}

void save_catalog(const Catalog& c, const std::string& path)
{
    json doc;
    doc["servers"] = json::array();
    for (const auto& s : c.servers) {
        doc["servers"].push_back({{"server_id", s.server_id},
                                  {"connect_time_s", s.connect_time_s},
                                  {"bandwidth_Bps", s.bandwidth_Bps}});
    }
    doc["videos"] = json::array();
    for (const auto& v : c.videos) {
        doc["videos"].push_back({{"video_id", v.video_id},
                                 {"size_bytes", v.size_bytes},
                                 {"duration_s", v.duration_s},
                                 {"server_id", v.server_id}});
    }
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot open " + path + " for writing");
    out << doc.dump(2) << '\n';
}

namespace {

template <typename T>
T require_field(const json& rec, const char* field, const std::string& where)
{
    auto it = rec.find(field);
    if (it == rec.end())
        throw ParseError(where + ": missing field '" + field + "'");
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + ": field '" + field + "': " + e.what());
    }
}

} // namespace

Catalog load_catalog(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open catalog file " + path);

    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("servers") || !doc.contains("videos"))
        throw ParseError(path + ": expected top-level 'servers' and 'videos' collections");

    Catalog c;
    size_t i = 0;
    for (const auto& rec : doc["servers"]) {
        const std::string where = path + ": servers[" + std::to_string(i++) + "]";
        ServerProfile s;
        s.server_id = require_field<uint32_t>(rec, "server_id", where);
        s.connect_time_s = require_field<double>(rec, "connect_time_s", where);
        s.bandwidth_Bps = require_field<double>(rec, "bandwidth_Bps", where);
        c.servers.push_back(s);
    }
    i = 0;
    for (const auto& rec : doc["videos"]) {
        const std::string where = path + ": videos[" + std::to_string(i++) + "]";
        VideoMeta v;
        v.video_id = require_field<uint64_t>(rec, "video_id", where);
        v.size_bytes = require_field<uint64_t>(rec, "size_bytes", where);
        v.duration_s = require_field<double>(rec, "duration_s", where);
        v.server_id = require_field<uint32_t>(rec, "server_id", where);
        c.videos.push_back(v);
    }

    auto problems = validate_catalog(c);
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << path << ": invalid catalog:";
        for (const auto& p : problems)
            msg << "\n  " << p;
        throw ValidationError(msg.str());
    }
    return c;
}

} // namespace vodsim
