#include "vodsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "vodsim/errors.hpp"

namespace vodsim {

std::vector<std::string> validate_arrival_model(const ArrivalModel& m)
{
    std::vector<std::string> problems;
    if (!(m.lambda > 0.0))
        problems.push_back("arrival: lambda must be > 0");
    if (m.n_max < 1)
        problems.push_back("arrival: n_max must be >= 1");
    if (m.lambda > static_cast<double>(m.n_max))
        problems.push_back("arrival: warning: lambda exceeds n_max; most of the Poisson mass "
                           "is rejected and counts pile up near 0");
    if (!(m.bucket_s > 0.0))
        problems.push_back("arrival: bucket_s must be > 0");
    return problems;
}

namespace {

// Poisson terms e^-lambda lambda^y / y! for y = 0..n, built iteratively.
std::vector<double> poisson_terms(double lambda, uint32_t n)
{
    std::vector<double> t(n + 1);
    t[0] = std::exp(-lambda);
    for (uint32_t y = 1; y <= n; ++y)
        t[y] = t[y - 1] * lambda / static_cast<double>(y);
    return t;
}

} // namespace

double modified_poisson_pmf(int64_t x, const ArrivalModel& m)
{
    if (x < 0 || x > static_cast<int64_t>(m.n_max))
        return 0.0;
    const auto terms = poisson_terms(m.lambda, m.n_max);
    const double z = std::accumulate(terms.begin(), terms.end(), 0.0);
    return terms[m.n_max - static_cast<uint32_t>(x)] / z;
}

double expected_arrivals_per_bucket(const ArrivalModel& m)
{
    const auto terms = poisson_terms(m.lambda, m.n_max);
    double z = 0.0, mean_y = 0.0;
    for (uint32_t y = 0; y <= m.n_max; ++y) {
        z += terms[y];
        mean_y += static_cast<double>(y) * terms[y];
    }
    return static_cast<double>(m.n_max) - mean_y / z;
}

std::vector<uint32_t> sample_arrivals(const ArrivalModel& m, uint64_t num_buckets, Rng& rng)
{
    std::vector<uint32_t> counts;
    counts.reserve(num_buckets);
    for (uint64_t b = 0; b < num_buckets; ++b) {
        uint64_t y;
        do {
            y = rng.poisson(m.lambda);
        } while (y > m.n_max);
        counts.push_back(m.n_max - static_cast<uint32_t>(y));
    }
    return counts;
}

SelectionModel::SelectionModel(double alpha, std::vector<uint64_t> rank_to_id)
    : alpha_(alpha), rank_to_id_(std::move(rank_to_id))
{
    if (rank_to_id_.empty())
        throw ConfigError("selection: rank map is empty");
    if (!(alpha_ > 0.0) || alpha_ > 2.0)
        throw ConfigError("selection: alpha must be in (0, 2]");

    cdf_.resize(rank_to_id_.size());
    double acc = 0.0;
    for (size_t i = 0; i < rank_to_id_.size(); ++i) {
        acc += std::pow(static_cast<double>(i + 1), -alpha_);
        cdf_[i] = acc;
    }
    harmonic_ = acc;
    for (double& v : cdf_)
        v /= harmonic_;
    cdf_.back() = 1.0;
}

SelectionModel SelectionModel::from_catalog(double alpha, const Catalog& c, bool shuffle_ranks,
                                            uint64_t seed)
{
    std::vector<uint64_t> ids;
    ids.reserve(c.videos.size());
    for (const auto& v : c.videos)
        ids.push_back(v.video_id);
    std::sort(ids.begin(), ids.end());

    if (shuffle_ranks) {
        Rng rng(mix_seed(seed, seed_stream::rank_shuffle));
        for (size_t i = ids.size(); i > 1; --i)
            std::swap(ids[i - 1], ids[rng.uniform_index(i)]);
    }
    return SelectionModel(alpha, std::move(ids));
}

double SelectionModel::pmf(uint64_t rank) const
{
    if (rank < 1 || rank > m())
        throw std::out_of_range("zipf rank " + std::to_string(rank) + " outside [1, " +
                                std::to_string(m()) + "]");
    return std::pow(static_cast<double>(rank), -alpha_) / harmonic_;
}

uint64_t SelectionModel::sample_rank(Rng& rng) const
{
    const double u = rng.next_double();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end())
        --it;
    return static_cast<uint64_t>(it - cdf_.begin()) + 1;
}

uint64_t SelectionModel::sample_video(Rng& rng) const
{
    return rank_to_id_[sample_rank(rng) - 1];
}

double zipf_like_pmf(uint64_t rank, const SelectionModel& model)
{
    return model.pmf(rank);
}

uint64_t sample_video(const SelectionModel& model, Rng& rng)
{
    return model.sample_video(rng);
}

uint64_t sample_bytes(const VideoMeta& video, const SessionModel& session, Rng& rng)
{
    if (!session.enabled)
        return video.size_bytes;

    const double duration = video.duration_s;
    double watch_s;
    if (rng.next_double() < session.early_quit_prob) {
        // quit inside the early window: uniform over (0, min(window, duration)]
        const double w = std::min(session.early_window_s, duration);
        watch_s = w * (1.0 - rng.next_double());
    } else if (duration > session.early_window_s) {
        // survived the window: uniform over (window, duration]
        watch_s = session.early_window_s +
                  (duration - session.early_window_s) * (1.0 - rng.next_double());
    } else {
        watch_s = duration;
    }

    const double frac = watch_s / duration;
    double bytes = std::ceil(static_cast<double>(video.size_bytes) * frac);
    bytes = std::min(bytes, static_cast<double>(video.size_bytes));
    return std::max<uint64_t>(1, static_cast<uint64_t>(bytes));
}

Trace generate_trace(const Catalog& catalog, const ArrivalModel& arrival,
                     const SelectionModel& selection, const SessionModel& session,
                     uint64_t num_buckets, uint64_t seed)
{
    if (selection.m() != catalog.videos.size())
        throw ConfigError("trace: selection model covers " + std::to_string(selection.m()) +
                          " videos but the catalog has " +
                          std::to_string(catalog.videos.size()));
    auto arrival_problems = validate_arrival_model(arrival);
    for (const auto& p : arrival_problems)
        if (p.find("warning") == std::string::npos)
            throw ConfigError(p);

    CatalogIndex index(catalog);
    Rng rng(mix_seed(seed, seed_stream::trace));
    const auto counts = sample_arrivals(arrival, num_buckets, rng);
    const int64_t bucket_ms = std::max<int64_t>(1, std::llround(arrival.bucket_s * 1000.0));

    Trace trace;
    trace.events.reserve(std::accumulate(counts.begin(), counts.end(), uint64_t{0}));

    std::vector<uint64_t> stamps;
    for (uint64_t b = 0; b < num_buckets; ++b) {
        const uint64_t base = b * static_cast<uint64_t>(bucket_ms);
        stamps.clear();
        for (uint32_t i = 0; i < counts[b]; ++i)
            stamps.push_back(base + rng.uniform_index(static_cast<uint64_t>(bucket_ms)));
        std::sort(stamps.begin(), stamps.end());
        for (uint64_t ts : stamps) {
            TraceEvent e;
            e.timestamp_ms = ts;
            e.video_id = selection.sample_video(rng);
            e.bytes_requested = sample_bytes(index.video(e.video_id), session, rng);
            trace.events.push_back(e);
        }
    }

    std::ostringstream hdr;
    hdr << "vodsim-trace v1 seed=" << seed << " lambda=" << arrival.lambda
        << " n_max=" << arrival.n_max << " bucket_s=" << arrival.bucket_s
        << " alpha=" << selection.alpha() << " session=" << (session.enabled ? 1 : 0)
        << " early_quit_prob=" << session.early_quit_prob
        << " early_window_s=" << session.early_window_s << " buckets=" << num_buckets
        << " videos=" << catalog.videos.size();
    trace.header = hdr.str();
    return trace;
}

std::vector<std::string> validate_trace(const Trace& trace, const Catalog& catalog)
{
    std::vector<std::string> problems;
    CatalogIndex index(catalog);
    uint64_t prev_ts = 0;
    for (size_t i = 0; i < trace.events.size(); ++i) {
        const auto& e = trace.events[i];
        const std::string tag = "event " + std::to_string(i);
        if (i > 0 && e.timestamp_ms < prev_ts)
            problems.push_back(tag + ": timestamp " + std::to_string(e.timestamp_ms) +
                               " out of order (previous " + std::to_string(prev_ts) + ")");
        prev_ts = e.timestamp_ms;

        const VideoMeta* v = index.find_video(e.video_id);
        if (v == nullptr) {
            problems.push_back(tag + ": video_id " + std::to_string(e.video_id) +
                               " not in catalog");
            continue;
        }
        if (e.bytes_requested < 1 || e.bytes_requested > v->size_bytes)
            problems.push_back(tag + ": bytes_requested " + std::to_string(e.bytes_requested) +
                               " outside [1, " + std::to_string(v->size_bytes) + "]");
    }
    return problems;
}

void save_trace(const Trace& trace, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot open " + path + " for writing");
    if (!trace.header.empty())
        out << "# " << trace.header << '\n';
    for (const auto& e : trace.events)
        out << e.timestamp_ms << ',' << e.video_id << ',' << e.bytes_requested << '\n';
}

Trace load_trace(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open trace file " + path);

    Trace trace;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::string h = line.substr(1);
            if (!h.empty() && h[0] == ' ')
                h.erase(0, 1);
            if (trace.header.empty())
                trace.header = h;
            continue;
        }
        TraceEvent e;
        char c1 = 0, c2 = 0;
        std::istringstream ls(line);
        if (!(ls >> e.timestamp_ms >> c1 >> e.video_id >> c2 >> e.bytes_requested) ||
            c1 != ',' || c2 != ',')
            throw ParseError(path + ":" + std::to_string(lineno) +
                             ": expected 'timestamp_ms,video_id,bytes_requested'");
        trace.events.push_back(e);
    }
    return trace;
}

uint64_t trace_fingerprint(const Trace& trace)
{
    uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& e : trace.events) {
        mix(e.timestamp_ms);
        mix(e.video_id);
        mix(e.bytes_requested);
    }
    return h;
}

} // namespace vodsim
