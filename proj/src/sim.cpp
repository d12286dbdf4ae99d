#include "vodsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "vodsim/errors.hpp"

namespace vodsim {

using nlohmann::json;

namespace {

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Independent byte accounting driven only by observed event outcomes, with a
// periodic full rescan; compared against the cache's own counters after
// every event in debug runs.
class InvariantAuditor {
public:
    InvariantAuditor(const Catalog& catalog, uint64_t capacity) : capacity_(capacity)
    {
        for (const auto& v : catalog.videos)
            sizes_.emplace(v.video_id, v.size_bytes);
    }

    void on_admit(uint64_t video_id, const std::vector<uint64_t>& evicted)
    {
        for (uint64_t id : evicted) {
            used_ -= sizes_.at(id);
            resident_.erase(id);
        }
        used_ += sizes_.at(video_id);
        resident_.insert(video_id);
    }

    void check(size_t event_index, const Cache& cache)
    {
        if (cache.used_bytes() > capacity_)
            fail(event_index, "capacity exceeded: used " + std::to_string(cache.used_bytes()) +
                                  " > " + std::to_string(capacity_));
        if (cache.used_bytes() != used_)
            fail(event_index, "byte accounting drift: cache says " +
                                  std::to_string(cache.used_bytes()) + ", audit says " +
                                  std::to_string(used_));
        if (++checks_ % 10'000 == 0)
            rescan(event_index, cache);
    }

    void rescan(size_t event_index, const Cache& cache)
    {
        uint64_t sum = 0;
        size_t n = 0;
        for (const auto& [id, key] : cache.resident_set()) {
            sum += sizes_.at(id);
            if (resident_.find(id) == resident_.end())
                fail(event_index, "resident video " + std::to_string(id) + " unknown to audit");
            ++n;
        }
        if (n != resident_.size() || sum != used_)
            fail(event_index, "full rescan mismatch");
        if (sum != cache.used_bytes())
            fail(event_index, "full rescan: used_bytes disagrees with resident sizes");
    }

private:
    [[noreturn]] void fail(size_t event_index, const std::string& what)
    {
        throw std::logic_error("invariant violation at event " + std::to_string(event_index) +
                               ": " + what);
    }

    uint64_t capacity_;
    uint64_t used_ = 0;
    size_t checks_ = 0;
    std::unordered_map<uint64_t, uint64_t> sizes_;
    std::unordered_set<uint64_t> resident_;
};

} // namespace

uint64_t buckets_for_target_requests(const ArrivalModel& arrival, uint64_t target_requests)
{
    const double per_bucket = expected_arrivals_per_bucket(arrival);
    const auto buckets = static_cast<uint64_t>(
        std::llround(static_cast<double>(target_requests) / std::max(per_bucket, 1e-9)));
    return std::max<uint64_t>(1, buckets);
}

Catalog materialize_catalog(const SimConfig& config)
{
    if (config.catalog.path)
        return load_catalog(*config.catalog.path);
    if (config.catalog.generate)
        return generate_catalog(*config.catalog.generate, config.seed);
    throw ConfigError("config: no catalog source");
}

Trace materialize_trace(const SimConfig& config, const Catalog& catalog)
{
    if (config.trace.path)
        return load_trace(*config.trace.path);
    if (!config.trace.generate)
        throw ConfigError("config: no trace source");

    const TraceGenSpec& gen = *config.trace.generate;
    uint64_t buckets = 0;
    if (gen.num_buckets)
        buckets = *gen.num_buckets;
    else if (gen.target_requests)
        buckets = buckets_for_target_requests(gen.arrival, *gen.target_requests);
    else
        throw ConfigError("config: trace.generate needs num_buckets or target_requests");

    auto selection =
        SelectionModel::from_catalog(gen.alpha, catalog, gen.shuffle_ranks, config.seed);
    return generate_trace(catalog, gen.arrival, selection, gen.session, buckets, config.seed);
}

uint64_t resolve_capacity(const CapacitySpec& capacity, const Catalog& catalog)
{
    if (capacity.bytes)
        return *capacity.bytes;
    if (capacity.fraction) {
        const double want = *capacity.fraction * static_cast<double>(catalog.total_bytes());
        return std::max<uint64_t>(1, static_cast<uint64_t>(std::llround(want)));
    }
    throw ConfigError("config: no capacity given");
}

RunResult run_simulation(const SimConfig& config, const Catalog& catalog, const Trace& trace,
                         const RunHooks& hooks)
{
    auto config_problems = config.validate();
    if (!config_problems.empty())
        throw ConfigError("invalid config: " + config_problems.front());

    auto catalog_problems = validate_catalog(catalog);
    if (!catalog_problems.empty())
        throw ValidationError("invalid catalog: " + catalog_problems.front());

    auto trace_problems = validate_trace(trace, catalog);
    if (!trace_problems.empty())
        throw ValidationError("trace/catalog mismatch: " + trace_problems.front() + " (" +
                              std::to_string(trace_problems.size()) + " violations)");

    const uint64_t capacity = resolve_capacity(config.capacity, catalog);
    CatalogIndex index(catalog);

    auto policy_config = config.policy;
    if (policy_config.kind == PolicyKind::RAND && policy_config.rand_seed == 0)
        policy_config.rand_seed = config.seed;
    auto policy = make_policy(policy_config);

    Cache cache(capacity, *policy);
    PopularityEstimator estimator;
    MetricsAccumulator metrics(config.hit_latency_s);

    std::ofstream eviction_log;
    int64_t current_ts = 0;
    const bool log_evictions = !config.eviction_log_path.empty();
    if (log_evictions) {
        const std::string path = resolve_output_path(config, config.eviction_log_path);
        eviction_log.open(path);
        if (!eviction_log)
            throw ConfigError("cannot open eviction log " + path + " for writing");
        eviction_log << "timestamp_ms,evicted_video_id,score\n";
    }
    if (log_evictions || hooks.eviction) {
        cache.set_eviction_observer(
            [&](const Cache& c, const CacheEntry& victim, double score) {
                if (log_evictions)
                    eviction_log << current_ts << ',' << victim.video_id << ','
                                 << fmt_double(score) << '\n';
                if (hooks.eviction)
                    hooks.eviction(c, victim, score);
            });
    }

    std::optional<InvariantAuditor> audit;
    if (config.check_invariants)
        audit.emplace(catalog, capacity);

    for (size_t i = 0; i < trace.events.size(); ++i) {
        const TraceEvent& e = trace.events[i];
        current_ts = static_cast<int64_t>(e.timestamp_ms);

        estimator.record(e.video_id);
        PolicyContext ctx{&index, &estimator, current_ts};
        cache.on_request(ctx);

        const VideoMeta& video = index.video(e.video_id);
        const ServerProfile& server = index.server(video.server_id);

        EventOutcome outcome;
        if (cache.lookup(e.video_id, current_ts, ctx)) {
            outcome = EventOutcome::Hit;
        } else {
            AdmitOutcome admit = cache.admit(video, current_ts, ctx);
            metrics.count_evictions(admit.evicted.size());
            outcome = admit.admitted ? EventOutcome::Miss : EventOutcome::NonCacheable;
            if (audit && admit.admitted)
                audit->on_admit(e.video_id, admit.evicted);
        }
        metrics.record_event(outcome, video, e.bytes_requested, server);

        if (audit)
            audit->check(i, cache);
        if (hooks.after_event)
            hooks.after_event(i, e, outcome, cache, *policy);
    }
    if (audit)
        audit->rescan(trace.events.size(), cache);

    RunResult r;
    r.report = metrics.finalize();
    r.policy = policy_name(config.policy.kind);
    r.seed = config.seed;
    r.capacity_bytes = capacity;
    r.capacity_fraction = config.capacity.fraction.value_or(0.0);
    if (config.trace.generate) {
        r.alpha = config.trace.generate->alpha;
        r.lambda = config.trace.generate->arrival.lambda;
    }
    r.trace_hash = trace_fingerprint(trace);
    return r;
}

RunResult run_simulation(const SimConfig& config, const Catalog& catalog, const Trace& trace)
{
    return run_simulation(config, catalog, trace, RunHooks{});
}

RunResult run_simulation(const SimConfig& config)
{
    const Catalog catalog = materialize_catalog(config);
    const Trace trace = materialize_trace(config, catalog);
    return run_simulation(config, catalog, trace);
}

SweepAxis parse_sweep_axis(const std::string& name)
{
    if (name == "capacity_fraction")
        return SweepAxis::CapacityFraction;
    if (name == "alpha")
        return SweepAxis::Alpha;
    if (name == "lambda")
        return SweepAxis::Lambda;
    if (name == "policy")
        return SweepAxis::Policy;
    throw ConfigError("unknown sweep axis '" + name +
                      "' (capacity_fraction, alpha, lambda, policy)");
}

const char* sweep_axis_name(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::CapacityFraction: return "capacity_fraction";
    case SweepAxis::Alpha: return "alpha";
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::Policy: return "policy";
    }
    return "?";
}

namespace {

SimConfig cell_config(const SimConfig& base, SweepAxis axis, std::optional<double> value,
                      std::optional<PolicyKind> policy)
{
    SimConfig c = base;
    if (policy)
        c.policy.kind = *policy;
    if (value) {
        switch (axis) {
        case SweepAxis::CapacityFraction:
            c.capacity.fraction = *value;
            c.capacity.bytes.reset();
            break;
        case SweepAxis::Alpha:
            if (!c.trace.generate)
                throw ConfigError("sweep: alpha axis needs a generated trace");
            c.trace.generate->alpha = *value;
            break;
        case SweepAxis::Lambda:
            if (!c.trace.generate)
                throw ConfigError("sweep: lambda axis needs a generated trace");
            c.trace.generate->arrival.lambda = *value;
            break;
        case SweepAxis::Policy:
            break;
        }
    }
    // sweep cells never write per-run files
    c.report_csv_path.clear();
    c.report_json_path.clear();
    c.eviction_log_path.clear();
    return c;
}

RunResult run_cell(const SimConfig& cfg)
{
    try {
        return run_simulation(cfg);
    } catch (const std::exception& e) {
        RunResult r;
        r.policy = policy_name(cfg.policy.kind);
        r.seed = cfg.seed;
        r.capacity_fraction = cfg.capacity.fraction.value_or(0.0);
        if (cfg.trace.generate) {
            r.alpha = cfg.trace.generate->alpha;
            r.lambda = cfg.trace.generate->arrival.lambda;
        }
        r.ok = false;
        r.error = e.what();
        return r;
    }
}

} // namespace

std::vector<RunResult> run_sweep(const SimConfig& base, SweepAxis axis,
                                 const std::vector<double>& values,
                                 const std::vector<PolicyKind>& policies, int jobs)
{
    std::vector<SimConfig> cells;
    if (axis == SweepAxis::Policy) {
        for (PolicyKind p : policies)
            cells.push_back(cell_config(base, axis, std::nullopt, p));
    } else if (policies.empty()) {
        for (double v : values)
            cells.push_back(cell_config(base, axis, v, std::nullopt));
    } else {
        for (PolicyKind p : policies)
            for (double v : values)
                cells.push_back(cell_config(base, axis, v, p));
    }

    std::vector<RunResult> results(cells.size());
    if (jobs <= 1) {
        for (size_t i = 0; i < cells.size(); ++i)
            results[i] = run_cell(cells[i]);
        return results;
    }

    size_t next = 0;
    while (next < cells.size()) {
        const size_t batch = std::min<size_t>(static_cast<size_t>(jobs), cells.size() - next);
        std::vector<std::future<RunResult>> futs;
        futs.reserve(batch);
        for (size_t i = 0; i < batch; ++i)
            futs.push_back(std::async(std::launch::async, run_cell, cells[next + i]));
        for (size_t i = 0; i < batch; ++i)
            results[next + i] = futs[i].get();
        next += batch;
    }
    return results;
}

ComparisonTable compare(const std::vector<RunResult>& results, const std::string& baseline_policy)
{
    if (results.size() < 2)
        throw ValidationError("compare: need at least two runs");

    const RunResult* base = nullptr;
    for (const auto& r : results) {
        if (!r.ok)
            throw ValidationError("compare: run '" + r.policy + "' failed: " + r.error);
        if (r.policy == baseline_policy)
            base = &r;
    }
    if (base == nullptr)
        throw ValidationError("compare: baseline policy '" + baseline_policy +
                              "' not among the runs");
    for (const auto& r : results)
        if (r.trace_hash != base->trace_hash)
            throw ValidationError("compare: run '" + r.policy +
                                  "' replayed a different trace than the baseline");

    ComparisonTable t;
    t.baseline = baseline_policy;
    for (const auto& r : results) {
        ComparisonRow row;
        row.policy = r.policy;
        row.hit_ratio = r.report.hit_ratio;
        row.delta_hit_ratio = r.report.hit_ratio - base->report.hit_ratio;
        row.byte_hit_ratio = r.report.byte_hit_ratio;
        row.delta_byte_hit_ratio = r.report.byte_hit_ratio - base->report.byte_hit_ratio;
        row.latency_mean_s = r.report.latency_mean_s;
        row.delta_latency_mean_s = r.report.latency_mean_s - base->report.latency_mean_s;
        t.rows.push_back(row);
    }
    return t;
}

std::string report_csv_header()
{
    return "policy,seed,capacity_bytes,capacity_fraction,alpha,lambda,requests,hits,"
           "hit_ratio,bytes_requested,bytes_from_server,byte_volume_ratio,byte_hit_ratio,"
           "latency_mean_s,latency_p50_s,latency_p95_s,evictions,non_cacheable,trace_hash,"
           "empty";
}

std::string report_csv_row(const RunResult& r)
{
    std::ostringstream out;
    out << r.policy << ',' << r.seed << ',' << r.capacity_bytes << ','
        << fmt_double(r.capacity_fraction) << ',' << fmt_double(r.alpha) << ','
        << fmt_double(r.lambda) << ',' << r.report.requests << ',' << r.report.hits << ','
        << fmt_double(r.report.hit_ratio) << ',' << r.report.bytes_requested << ','
        << r.report.bytes_from_server << ',' << fmt_double(r.report.byte_volume_ratio) << ','
        << fmt_double(r.report.byte_hit_ratio) << ',' << fmt_double(r.report.latency_mean_s)
        << ',' << fmt_double(r.report.latency_p50_s) << ','
        << fmt_double(r.report.latency_p95_s) << ',' << r.report.evictions << ','
        << r.report.non_cacheable << ',' << r.trace_hash << ',' << (r.report.empty ? 1 : 0);
    return out.str();
}

void write_report_csv(const RunResult& r, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << report_csv_header() << '\n' << report_csv_row(r) << '\n';
}

namespace {

json config_echo(const SimConfig& config)
{
    json j;
    j["seed"] = config.seed;
    j["policy"]["kind"] = policy_name(config.policy.kind);
    switch (config.policy.kind) {
    case PolicyKind::RV:
        j["policy"]["rv"] = {{"alpha", config.policy.rv.alpha},
                             {"b", config.policy.rv.b},
                             {"k_bytes", config.policy.rv.k_bytes},
                             {"epsilon_ms", config.policy.rv.epsilon_ms}};
        break;
    case PolicyKind::LRU_K:
        j["policy"]["lru_k"] = {{"k", config.policy.lru_k.k},
                                {"rp_ms", config.policy.lru_k.rp_ms}};
        break;
    case PolicyKind::LFU_AGING:
        j["policy"]["lfu_aging"] = {{"max_count", config.policy.lfu_aging.max_count},
                                    {"interval_events", config.policy.lfu_aging.interval_events}};
        break;
    case PolicyKind::GDS:
    case PolicyKind::GDS_AGING:
        j["policy"]["gds"] = {{"k_bytes", config.policy.gds.k_bytes}};
        break;
    default:
        break;
    }
    if (config.capacity.bytes)
        j["capacity"]["bytes"] = *config.capacity.bytes;
    if (config.capacity.fraction)
        j["capacity"]["fraction"] = *config.capacity.fraction;
    if (config.catalog.path)
        j["catalog"]["path"] = *config.catalog.path;
    if (config.catalog.generate) {
        const auto& g = *config.catalog.generate;
        j["catalog"]["generate"] = {{"num_videos", g.num_videos},
                                    {"num_servers", g.num_servers},
                                    {"bitrate_bps", g.bitrate_bps}};
    }
    if (config.trace.path)
        j["trace"]["path"] = *config.trace.path;
    if (config.trace.generate) {
        const auto& g = *config.trace.generate;
        json t = {{"lambda", g.arrival.lambda},
                  {"n_max", g.arrival.n_max},
                  {"bucket_s", g.arrival.bucket_s},
                  {"alpha", g.alpha},
                  {"shuffle_ranks", g.shuffle_ranks},
                  {"session",
                   {{"enabled", g.session.enabled},
                    {"early_quit_prob", g.session.early_quit_prob},
                    {"early_window_s", g.session.early_window_s}}}};
        if (g.num_buckets)
            t["num_buckets"] = *g.num_buckets;
        if (g.target_requests)
            t["target_requests"] = *g.target_requests;
        j["trace"]["generate"] = t;
    }
    j["hit_latency_s"] = config.hit_latency_s;
    return j;
}

} // namespace

std::string report_json(const RunResult& r, const SimConfig& config)
{
    json j;
    j["run"] = config_echo(config);
    j["run"]["resolved_capacity_bytes"] = r.capacity_bytes;
    j["run"]["policy_name"] = r.policy;
    j["run"]["trace_hash"] = r.trace_hash;
    j["metrics"] = {{"requests", r.report.requests},
                    {"hits", r.report.hits},
                    {"hit_ratio", r.report.hit_ratio},
                    {"bytes_requested", r.report.bytes_requested},
                    {"bytes_from_server", r.report.bytes_from_server},
                    {"byte_volume_ratio", r.report.byte_volume_ratio},
                    {"byte_hit_ratio", r.report.byte_hit_ratio},
                    {"latency_mean_s", r.report.latency_mean_s},
                    {"latency_p50_s", r.report.latency_p50_s},
                    {"latency_p95_s", r.report.latency_p95_s},
                    {"evictions", r.report.evictions},
                    {"non_cacheable", r.report.non_cacheable},
                    {"empty", r.report.empty}};
    return j.dump(2) + "\n";
}

void write_report_json(const RunResult& r, const SimConfig& config, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << report_json(r, config);
}

RunResult load_report_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open report file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        RunResult r;
        const auto& run = j.at("run");
        r.policy = run.at("policy_name").get<std::string>();
        r.seed = run.at("seed").get<uint64_t>();
        r.capacity_bytes = run.at("resolved_capacity_bytes").get<uint64_t>();
        r.trace_hash = run.at("trace_hash").get<uint64_t>();
        if (run.contains("capacity") && run.at("capacity").contains("fraction"))
            r.capacity_fraction = run.at("capacity").at("fraction").get<double>();
        if (run.contains("trace") && run.at("trace").contains("generate")) {
            r.alpha = run.at("trace").at("generate").at("alpha").get<double>();
            r.lambda = run.at("trace").at("generate").at("lambda").get<double>();
        }
        const auto& m = j.at("metrics");
        r.report.requests = m.at("requests").get<uint64_t>();
        r.report.hits = m.at("hits").get<uint64_t>();
        r.report.hit_ratio = m.at("hit_ratio").get<double>();
        r.report.bytes_requested = m.at("bytes_requested").get<uint64_t>();
        r.report.bytes_from_server = m.at("bytes_from_server").get<uint64_t>();
        r.report.byte_volume_ratio = m.at("byte_volume_ratio").get<double>();
        r.report.byte_hit_ratio = m.at("byte_hit_ratio").get<double>();
        r.report.latency_mean_s = m.at("latency_mean_s").get<double>();
        r.report.latency_p50_s = m.at("latency_p50_s").get<double>();
        r.report.latency_p95_s = m.at("latency_p95_s").get<double>();
        r.report.evictions = m.at("evictions").get<uint64_t>();
        r.report.non_cacheable = m.at("non_cacheable").get<uint64_t>();
        r.report.empty = m.at("empty").get<bool>();
        return r;
    } catch (const json::exception& e) {
        throw ParseError(path + ": not a vodsim report: " + e.what());
    }
}

void write_sweep_csv(const std::vector<RunResult>& results, SweepAxis axis,
                     const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open " + path + " for writing");
    out << "axis,value,status,error," << report_csv_header() << '\n';
    for (const auto& r : results) {
        double value = 0.0;
        switch (axis) {
        case SweepAxis::CapacityFraction: value = r.capacity_fraction; break;
        case SweepAxis::Alpha: value = r.alpha; break;
        case SweepAxis::Lambda: value = r.lambda; break;
        case SweepAxis::Policy: value = 0.0; break;
        }
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n')
                ch = ';';
        out << sweep_axis_name(axis) << ',' << fmt_double(value) << ','
            << (r.ok ? "ok" : "error") << ',' << err << ',' << report_csv_row(r) << '\n';
    }
}

std::string comparison_csv(const ComparisonTable& table)
{
    std::ostringstream out;
    out << "policy,baseline,hit_ratio,delta_hit_ratio,byte_hit_ratio,delta_byte_hit_ratio,"
           "latency_mean_s,delta_latency_mean_s\n";
    for (const auto& row : table.rows)
        out << row.policy << ',' << table.baseline << ',' << fmt_double(row.hit_ratio) << ','
            << fmt_double(row.delta_hit_ratio) << ',' << fmt_double(row.byte_hit_ratio) << ','
            << fmt_double(row.delta_byte_hit_ratio) << ',' << fmt_double(row.latency_mean_s)
            << ',' << fmt_double(row.delta_latency_mean_s) << '\n';
    return out.str();
}

std::string comparison_text(const ComparisonTable& table)
{
    std::ostringstream out;
    out << "baseline: " << table.baseline << '\n';
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %10s %+11s %10s %+11s %12s %+13s\n", "policy",
                  "hit", "d_hit", "byte_hit", "d_byte_hit", "latency_s", "d_latency_s");
    out << line;
    for (const auto& row : table.rows) {
        std::snprintf(line, sizeof(line), "%-10s %10.4f %+11.4f %10.4f %+11.4f %12.4f %+13.4f\n",
                      row.policy.c_str(), row.hit_ratio, row.delta_hit_ratio,
                      row.byte_hit_ratio, row.delta_byte_hit_ratio, row.latency_mean_s,
                      row.delta_latency_mean_s);
        out << line;
    }
    return out.str();
}

std::string resolve_output_path(const SimConfig& config, const std::string& path)
{
    if (path.empty() || path.front() == '/')
        return path;
    std::string dir = config.out_dir;
    if (const char* env = std::getenv("VODSIM_OUT_DIR"); env != nullptr && *env != '\0')
        dir = env;
    if (dir.empty())
        return path;
    if (dir.back() != '/')
        dir += '/';
    return dir + path;
}

} // namespace vodsim
