// vodsim: trace-driven simulator for video-on-demand proxy-cache replacement
// policies. Subcommands generate catalogs and request traces, replay a trace
// against a chosen eviction policy, sweep a parameter axis, and diff reports.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vodsim/errors.hpp"
#include "vodsim/sim.hpp"

namespace {

using namespace vodsim;

SimConfig base_config(const std::string& config_path, const std::string& preset)
{
    if (!config_path.empty())
        return load_config(config_path);
    return preset_config(preset);
}

std::vector<PolicyKind> parse_policy_list(const std::string& csv)
{
    std::vector<PolicyKind> out;
    std::string cur;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!cur.empty())
                out.push_back(parse_policy_kind(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return out;
}

int cmd_gen_catalog(const std::string& config_path, const std::string& preset,
                    const std::string& out, std::optional<uint64_t> seed,
                    std::optional<uint32_t> num_videos, std::optional<uint32_t> num_servers)
{
    SimConfig cfg = base_config(config_path, preset);
    if (!cfg.catalog.generate)
        cfg.catalog.generate = CatalogGenSpec{};
    if (seed)
        cfg.seed = *seed;
    if (num_videos)
        cfg.catalog.generate->num_videos = *num_videos;
    if (num_servers)
        cfg.catalog.generate->num_servers = *num_servers;

    Catalog c = generate_catalog(*cfg.catalog.generate, cfg.seed);
    save_catalog(c, resolve_output_path(cfg, out));
    std::cout << "wrote " << out << ": " << c.videos.size() << " videos, " << c.servers.size()
              << " servers, " << c.total_bytes() << " bytes total\n";
    return 0;
}

int cmd_gen_trace(const std::string& config_path, const std::string& preset,
                  const std::string& catalog_path, const std::string& out,
                  std::optional<uint64_t> seed, std::optional<double> lambda,
                  std::optional<double> alpha, std::optional<uint64_t> buckets,
                  std::optional<uint64_t> target_requests, std::optional<bool> session)
{
    SimConfig cfg = base_config(config_path, preset);
    if (!cfg.trace.generate)
        cfg.trace.generate = TraceGenSpec{};
    if (seed)
        cfg.seed = *seed;
    if (!catalog_path.empty()) {
        cfg.catalog.path = catalog_path;
        cfg.catalog.generate.reset();
    }
    TraceGenSpec& gen = *cfg.trace.generate;
    if (lambda)
        gen.arrival.lambda = *lambda;
    if (alpha)
        gen.alpha = *alpha;
    if (buckets) {
        gen.num_buckets = *buckets;
        gen.target_requests.reset();
    }
    if (target_requests) {
        gen.target_requests = *target_requests;
        gen.num_buckets.reset();
    }
    if (session)
        gen.session.enabled = *session;

    Catalog catalog = materialize_catalog(cfg);
    Trace trace = materialize_trace(cfg, catalog);
    save_trace(trace, resolve_output_path(cfg, out));
    std::cout << "wrote " << out << ": " << trace.events.size() << " events\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& preset,
                 const std::string& policy, std::optional<double> capacity_fraction,
                 std::optional<uint64_t> capacity_bytes, std::optional<uint64_t> seed,
                 const std::string& catalog_path, const std::string& trace_path,
                 const std::string& report_csv, const std::string& report_json_path,
                 const std::string& eviction_log, bool check_invariants)
{
    SimConfig cfg = base_config(config_path, preset);
    if (!policy.empty())
        cfg.policy.kind = parse_policy_kind(policy);
    if (capacity_fraction) {
        cfg.capacity.fraction = *capacity_fraction;
        cfg.capacity.bytes.reset();
    }
    if (capacity_bytes) {
        cfg.capacity.bytes = *capacity_bytes;
        cfg.capacity.fraction.reset();
    }
    if (seed)
        cfg.seed = *seed;
    if (!catalog_path.empty()) {
        cfg.catalog.path = catalog_path;
        cfg.catalog.generate.reset();
    }
    if (!trace_path.empty()) {
        cfg.trace.path = trace_path;
        cfg.trace.generate.reset();
    }
    if (!report_csv.empty())
        cfg.report_csv_path = report_csv;
    if (!report_json_path.empty())
        cfg.report_json_path = report_json_path;
    if (!eviction_log.empty())
        cfg.eviction_log_path = eviction_log;
    if (check_invariants)
        cfg.check_invariants = true;

    RunResult r = run_simulation(cfg);
    std::cout << report_csv_header() << '\n' << report_csv_row(r) << '\n';
    if (!cfg.report_csv_path.empty())
        write_report_csv(r, resolve_output_path(cfg, cfg.report_csv_path));
    if (!cfg.report_json_path.empty())
        write_report_json(r, cfg, resolve_output_path(cfg, cfg.report_json_path));
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& preset,
              const std::string& axis_name, std::vector<double> values,
              const std::string& policies_csv, const std::string& out, int jobs,
              bool light_to_heavy)
{
    SimConfig cfg = base_config(config_path, preset);
    SweepAxis axis = parse_sweep_axis(axis_name);
    std::vector<PolicyKind> policies;
    if (!policies_csv.empty())
        policies = parse_policy_list(policies_csv);
    if (light_to_heavy) {
        axis = SweepAxis::Lambda;
        values = light_to_heavy_lambda_values();
    }
    if (axis == SweepAxis::Policy && policies.empty())
        throw ConfigError("sweep: policy axis needs --policies");
    if (axis != SweepAxis::Policy && values.empty() && !light_to_heavy)
        throw ConfigError("sweep: numeric axis needs --values");

    auto results = run_sweep(cfg, axis, values, policies, jobs);
    write_sweep_csv(results, axis, resolve_output_path(cfg, out));

    size_t failed = 0;
    for (const auto& r : results)
        if (!r.ok)
            ++failed;
    std::cout << "wrote " << out << ": " << results.size() << " cells";
    if (failed > 0)
        std::cout << " (" << failed << " failed)";
    std::cout << '\n';
    return failed == 0 ? 0 : 1;
}

int cmd_compare(const std::string& baseline, const std::vector<std::string>& report_files,
                const std::string& out)
{
    std::vector<RunResult> results;
    results.reserve(report_files.size());
    for (const auto& f : report_files)
        results.push_back(load_report_json(f));
    ComparisonTable table = compare(results, baseline);
    std::cout << comparison_text(table);
    if (!out.empty()) {
        std::ofstream o(out);
        if (!o)
            throw ConfigError("cannot open " + out + " for writing");
        o << comparison_csv(table);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"trace-driven VoD proxy-cache replacement simulator"};
    app.require_subcommand(1);

    std::string config_path, preset = "paper";

    // gen-catalog
    auto* gc = app.add_subcommand("gen-catalog", "generate a synthetic video catalog");
    std::string gc_out = "catalog.json";
    std::optional<uint64_t> gc_seed;
    std::optional<uint32_t> gc_videos, gc_servers;
    gc->add_option("--config", config_path, "JSON config file");
    gc->add_option("--preset", preset, "preset when no config is given (paper|none)");
    gc->add_option("--out", gc_out, "output catalog path");
    gc->add_option("--seed", gc_seed, "override seed");
    gc->add_option("--num-videos", gc_videos, "override video count");
    gc->add_option("--num-servers", gc_servers, "override server count");

    // gen-trace
    auto* gt = app.add_subcommand("gen-trace", "generate a synthetic request trace");
    std::string gt_catalog, gt_out = "trace.csv";
    std::optional<uint64_t> gt_seed, gt_buckets, gt_target;
    std::optional<double> gt_lambda, gt_alpha;
    std::optional<bool> gt_session;
    gt->add_option("--config", config_path, "JSON config file");
    gt->add_option("--preset", preset, "preset when no config is given (paper|none)");
    gt->add_option("--catalog", gt_catalog, "catalog file (else generated per config)");
    gt->add_option("--out", gt_out, "output trace path");
    gt->add_option("--seed", gt_seed, "override seed");
    gt->add_option("--lambda", gt_lambda, "arrival rate per bucket");
    gt->add_option("--alpha", gt_alpha, "popularity skew");
    gt->add_option("--buckets", gt_buckets, "number of time buckets");
    gt->add_option("--target-requests", gt_target, "derive bucket count from a request budget");
    gt->add_option("--session", gt_session, "session truncation on/off");

    // simulate
    auto* sim = app.add_subcommand("simulate", "replay a trace against a policy");
    std::string sim_policy, sim_catalog, sim_trace, sim_csv, sim_json, sim_evlog;
    std::optional<double> sim_capfrac;
    std::optional<uint64_t> sim_capbytes, sim_seed;
    bool sim_check = false;
    sim->add_option("--config", config_path, "JSON config file");
    sim->add_option("--preset", preset, "preset when no config is given (paper|none)");
    sim->add_option("--policy", sim_policy,
                    "rv|lru|lfu|lfu_aging|lfuda|fifo|rand|gds|gds_aging|lru_k");
    sim->add_option("--capacity-fraction", sim_capfrac, "cache size as corpus fraction");
    sim->add_option("--capacity-bytes", sim_capbytes, "cache size in bytes");
    sim->add_option("--seed", sim_seed, "override seed");
    sim->add_option("--catalog", sim_catalog, "catalog file");
    sim->add_option("--trace", sim_trace, "trace file");
    sim->add_option("--report-csv", sim_csv, "write the report as CSV");
    sim->add_option("--report-json", sim_json, "write the report as JSON");
    sim->add_option("--eviction-log", sim_evlog, "write timestamp,victim,score lines");
    sim->add_flag("--check-invariants", sim_check, "audit capacity/accounting per event");

    // sweep
    auto* sw = app.add_subcommand("sweep", "run one simulation per axis value");
    std::string sw_axis = "capacity_fraction", sw_policies, sw_out = "sweep.csv";
    std::vector<double> sw_values;
    int sw_jobs = 1;
    bool sw_light = false;
    sw->add_option("--config", config_path, "JSON config file");
    sw->add_option("--preset", preset, "preset when no config is given (paper|none)");
    sw->add_option("--axis", sw_axis, "capacity_fraction|alpha|lambda|policy");
    sw->add_option("--values", sw_values, "axis values")->delimiter(',');
    sw->add_option("--policies", sw_policies, "comma-separated policies (cross product)");
    sw->add_option("--out", sw_out, "output CSV");
    sw->add_option("--jobs", sw_jobs, "concurrent cells");
    sw->add_flag("--light-to-heavy", sw_light, "lambda sweep preset: 1..15 requests/bucket");

    // compare
    auto* cp = app.add_subcommand("compare", "diff report JSONs against a baseline policy");
    std::string cp_baseline = "lru", cp_out;
    std::vector<std::string> cp_files;
    cp->add_option("--baseline", cp_baseline, "baseline policy name");
    cp->add_option("--out", cp_out, "also write the table as CSV");
    cp->add_option("reports", cp_files, "report JSON files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gc->parsed())
            return cmd_gen_catalog(config_path, preset, gc_out, gc_seed, gc_videos, gc_servers);
        if (gt->parsed())
            return cmd_gen_trace(config_path, preset, gt_catalog, gt_out, gt_seed, gt_lambda,
                                 gt_alpha, gt_buckets, gt_target, gt_session);
        if (sim->parsed())
            return cmd_simulate(config_path, preset, sim_policy, sim_capfrac, sim_capbytes,
                                sim_seed, sim_catalog, sim_trace, sim_csv, sim_json, sim_evlog,
                                sim_check);
        if (sw->parsed())
            return cmd_sweep(config_path, preset, sw_axis, sw_values, sw_policies, sw_out,
                             sw_jobs, sw_light);
        if (cp->parsed())
            return cmd_compare(cp_baseline, cp_files, cp_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: parse: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: validation: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
