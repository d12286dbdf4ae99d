#include "vodsim/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vodsim/errors.hpp"

namespace vodsim {

using nlohmann::json;

std::vector<std::string> SimConfig::validate() const
{
    std::vector<std::string> problems;

    const bool has_cat_path = catalog.path.has_value();
    const bool has_cat_gen = catalog.generate.has_value();
    if (has_cat_path == has_cat_gen)
        problems.push_back("config: exactly one of catalog.path / catalog.generate required");

    const bool has_trace_path = trace.path.has_value();
    const bool has_trace_gen = trace.generate.has_value();
    if (has_trace_path == has_trace_gen)
        problems.push_back("config: exactly one of trace.path / trace.generate required");
    if (has_trace_gen) {
        const auto& g = *trace.generate;
        if (g.num_buckets.has_value() == g.target_requests.has_value())
            problems.push_back("config: trace.generate needs exactly one of num_buckets / "
                               "target_requests");
        for (const auto& p : validate_arrival_model(g.arrival))
            if (p.find("warning") == std::string::npos)
                problems.push_back("config: " + p);
        if (!(g.alpha > 0.0) || g.alpha > 2.0)
            problems.push_back("config: trace.generate.alpha must be in (0, 2]");
        if (g.session.early_quit_prob < 0.0 || g.session.early_quit_prob > 1.0)
            problems.push_back("config: session.early_quit_prob must be in [0, 1]");
        if (!(g.session.early_window_s > 0.0))
            problems.push_back("config: session.early_window_s must be > 0");
    }

    if (capacity.bytes.has_value() == capacity.fraction.has_value())
        problems.push_back("config: exactly one of capacity.bytes / capacity.fraction required");
    if (capacity.fraction && (!(*capacity.fraction > 0.0) || *capacity.fraction > 1.0))
        problems.push_back("config: capacity.fraction must be in (0, 1]");
    if (capacity.bytes && *capacity.bytes < 1)
        problems.push_back("config: capacity.bytes must be >= 1");

    if (hit_latency_s < 0.0)
        problems.push_back("config: hit_latency_s must be >= 0");

    for (const auto& p : policy.validate())
        problems.push_back("config: " + p);
    return problems;
}

SimConfig preset_config(const std::string& name)
{
    SimConfig c;
    if (name == "none" || name.empty())
        return c;
    if (name != "paper")
        throw ConfigError("unknown preset '" + name + "' (expected 'paper' or 'none')");

    // Default evaluation setup: 1000-video catalog, lambda=15/N=27 arrivals,
    // alpha=0.77 selection, session truncation 0.70 within 20 minutes,
    // RV policy, 100k-request budget, capacity 10% of the corpus.
    CatalogGenSpec cat;
    cat.num_videos = 1000;
    cat.num_servers = 4;
    c.catalog.generate = cat;

    TraceGenSpec gen;
    gen.arrival = ArrivalModel{15.0, 27, 60.0};
    gen.alpha = 0.77;
    gen.session = SessionModel{true, 0.70, 1200.0};
    gen.target_requests = 100'000;
    c.trace.generate = gen;

    c.policy.kind = PolicyKind::RV;
    c.capacity.fraction = 0.10;
    c.seed = 42;
    return c;
}

std::vector<double> light_to_heavy_lambda_values()
{
    std::vector<double> v;
    for (int i = 1; i <= 15; ++i)
        v.push_back(static_cast<double>(i));
    return v;
}

namespace {

SizeDist::Kind parse_size_kind(const std::string& s)
{
    if (s == "fixed")
        return SizeDist::Kind::Fixed;
    if (s == "uniform")
        return SizeDist::Kind::Uniform;
    if (s == "log_uniform" || s == "loguniform")
        return SizeDist::Kind::LogUniform;
    throw ConfigError("unknown size_dist kind '" + s + "'");
}

void apply_catalog_gen(CatalogGenSpec& spec, const json& j)
{
    if (j.contains("num_videos"))
        spec.num_videos = j.at("num_videos").get<uint32_t>();
    if (j.contains("num_servers"))
        spec.num_servers = j.at("num_servers").get<uint32_t>();
    if (j.contains("bitrate_bps"))
        spec.bitrate_bps = j.at("bitrate_bps").get<double>();
    if (j.contains("size_dist")) {
        const auto& d = j.at("size_dist");
        if (d.contains("kind"))
            spec.size_dist.kind = parse_size_kind(d.at("kind").get<std::string>());
        if (d.contains("min_bytes"))
            spec.size_dist.min_bytes = d.at("min_bytes").get<double>();
        if (d.contains("max_bytes"))
            spec.size_dist.max_bytes = d.at("max_bytes").get<double>();
        if (d.contains("fixed_bytes")) {
            spec.size_dist.kind = SizeDist::Kind::Fixed;
            spec.size_dist.min_bytes = d.at("fixed_bytes").get<double>();
            spec.size_dist.max_bytes = spec.size_dist.min_bytes;
        }
    }
    if (j.contains("server_dist")) {
        const auto& d = j.at("server_dist");
        if (d.contains("connect_min_s"))
            spec.server_dist.connect_min_s = d.at("connect_min_s").get<double>();
        if (d.contains("connect_max_s"))
            spec.server_dist.connect_max_s = d.at("connect_max_s").get<double>();
        if (d.contains("bandwidth_min_Bps"))
            spec.server_dist.bandwidth_min_Bps = d.at("bandwidth_min_Bps").get<double>();
        if (d.contains("bandwidth_max_Bps"))
            spec.server_dist.bandwidth_max_Bps = d.at("bandwidth_max_Bps").get<double>();
    }
}

void apply_trace_gen(TraceGenSpec& gen, const json& j)
{
    if (j.contains("lambda"))
        gen.arrival.lambda = j.at("lambda").get<double>();
    if (j.contains("n_max"))
        gen.arrival.n_max = j.at("n_max").get<uint32_t>();
    if (j.contains("bucket_s"))
        gen.arrival.bucket_s = j.at("bucket_s").get<double>();
    if (j.contains("alpha"))
        gen.alpha = j.at("alpha").get<double>();
    if (j.contains("shuffle_ranks"))
        gen.shuffle_ranks = j.at("shuffle_ranks").get<bool>();
    if (j.contains("session")) {
        const auto& s = j.at("session");
        if (s.contains("enabled"))
            gen.session.enabled = s.at("enabled").get<bool>();
        if (s.contains("early_quit_prob"))
            gen.session.early_quit_prob = s.at("early_quit_prob").get<double>();
        if (s.contains("early_window_s"))
            gen.session.early_window_s = s.at("early_window_s").get<double>();
    }
    if (j.contains("num_buckets")) {
        gen.num_buckets = j.at("num_buckets").get<uint64_t>();
        gen.target_requests.reset();
    }
    if (j.contains("target_requests")) {
        gen.target_requests = j.at("target_requests").get<uint64_t>();
        if (j.contains("num_buckets"))
            throw ConfigError("config: trace.generate has both num_buckets and "
                              "target_requests");
        gen.num_buckets.reset();
    }
}

void apply_policy(PolicyConfig& p, const json& j)
{
    if (j.contains("kind"))
        p.kind = parse_policy_kind(j.at("kind").get<std::string>());
    if (j.contains("rv")) {
        const auto& r = j.at("rv");
        if (r.contains("alpha"))
            p.rv.alpha = r.at("alpha").get<double>();
        if (r.contains("b"))
            p.rv.b = r.at("b").get<double>();
        if (r.contains("k_bytes"))
            p.rv.k_bytes = r.at("k_bytes").get<double>();
        if (r.contains("epsilon_ms"))
            p.rv.epsilon_ms = r.at("epsilon_ms").get<int64_t>();
    }
    if (j.contains("lru_k")) {
        const auto& r = j.at("lru_k");
        if (r.contains("k"))
            p.lru_k.k = r.at("k").get<uint32_t>();
        if (r.contains("rp_ms"))
            p.lru_k.rp_ms = r.at("rp_ms").get<int64_t>();
    }
    if (j.contains("lfu_aging")) {
        const auto& r = j.at("lfu_aging");
        if (r.contains("max_count"))
            p.lfu_aging.max_count = r.at("max_count").get<uint32_t>();
        if (r.contains("interval_events"))
            p.lfu_aging.interval_events = r.at("interval_events").get<uint64_t>();
    }
    if (j.contains("gds")) {
        const auto& r = j.at("gds");
        if (r.contains("k_bytes"))
            p.gds.k_bytes = r.at("k_bytes").get<double>();
    }
    if (j.contains("rand_seed"))
        p.rand_seed = j.at("rand_seed").get<uint64_t>();
}

} // namespace

SimConfig parse_config_json(const std::string& text, const std::string& origin)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    if (!doc.is_object())
        throw ParseError(origin + ": config must be a JSON object");

    SimConfig c;
    try {
        if (doc.contains("preset"))
            c = preset_config(doc.at("preset").get<std::string>());

        if (doc.contains("seed"))
            c.seed = doc.at("seed").get<uint64_t>();

        if (doc.contains("catalog")) {
            const auto& j = doc.at("catalog");
            if (j.contains("path")) {
                c.catalog.path = j.at("path").get<std::string>();
                c.catalog.generate.reset();
            }
            if (j.contains("generate")) {
                if (!c.catalog.generate)
                    c.catalog.generate = CatalogGenSpec{};
                apply_catalog_gen(*c.catalog.generate, j.at("generate"));
                c.catalog.path.reset();
            }
            if (j.contains("path") && j.contains("generate"))
                throw ConfigError("config: catalog has both path and generate");
        }

        if (doc.contains("trace")) {
            const auto& j = doc.at("trace");
            if (j.contains("path")) {
                c.trace.path = j.at("path").get<std::string>();
                c.trace.generate.reset();
            }
            if (j.contains("generate")) {
                if (!c.trace.generate)
                    c.trace.generate = TraceGenSpec{};
                apply_trace_gen(*c.trace.generate, j.at("generate"));
                c.trace.path.reset();
            }
            if (j.contains("path") && j.contains("generate"))
                throw ConfigError("config: trace has both path and generate");
        }

        if (doc.contains("policy"))
            apply_policy(c.policy, doc.at("policy"));

        if (doc.contains("capacity")) {
            const auto& j = doc.at("capacity");
            if (j.contains("bytes")) {
                c.capacity.bytes = j.at("bytes").get<uint64_t>();
                c.capacity.fraction.reset();
            }
            if (j.contains("fraction")) {
                c.capacity.fraction = j.at("fraction").get<double>();
                if (j.contains("bytes"))
                    throw ConfigError("config: capacity has both bytes and fraction");
                c.capacity.bytes.reset();
            }
        }

        if (doc.contains("hit_latency_s"))
            c.hit_latency_s = doc.at("hit_latency_s").get<double>();
        if (doc.contains("check_invariants"))
            c.check_invariants = doc.at("check_invariants").get<bool>();

        if (doc.contains("outputs")) {
            const auto& j = doc.at("outputs");
            if (j.contains("report_csv"))
                c.report_csv_path = j.at("report_csv").get<std::string>();
            if (j.contains("report_json"))
                c.report_json_path = j.at("report_json").get<std::string>();
            if (j.contains("eviction_log"))
                c.eviction_log_path = j.at("eviction_log").get<std::string>();
            if (j.contains("dir"))
                c.out_dir = j.at("dir").get<std::string>();
        }
    } catch (const json::exception& e) {
        throw ParseError(origin + ": " + e.what());
    }

    auto problems = c.validate();
    if (!problems.empty()) {
        std::ostringstream msg;
        msg << origin << ": invalid config:";
        for (const auto& p : problems)
            msg << "\n  " << p;
        throw ConfigError(msg.str());
    }
    return c;
}

SimConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str(), path);
}

} // namespace vodsim
