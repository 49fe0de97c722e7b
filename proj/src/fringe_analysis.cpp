#include "pathid/fringe_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include <Eigen/Dense>

#include "pathid/diagnostics.hpp"
#include "pathid/error.hpp"
#include "pathid/random.hpp"

namespace pathid::analysis {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr std::uint64_t kChunkStreamBase = 1000;

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Indices of local peaks of `sign * x` (sign = +1 maxima, -1 minima) that are
// also the extreme of the `reach` bins on either side.
std::vector<std::size_t> candidates(std::span<const double> x, double sign, std::size_t reach) {
    std::vector<std::size_t> out;
    const std::size_t n = x.size();
    std::size_t i = 1;
    while (i + 1 < n) {
        std::size_t r = i;
        while (r + 1 < n && x[r + 1] == x[i]) ++r;
        if (r + 1 < n && sign * x[i - 1] < sign * x[i] && sign * x[r + 1] < sign * x[i]) {
            const std::size_t lo = i > reach ? i - reach : 0;
            const std::size_t hi = std::min(n - 1, r + reach);
            bool extreme = true;
            for (std::size_t k = lo; k <= hi && extreme; ++k) extreme = sign * x[k] <= sign * x[i];
            if (extreme) out.push_back(i);
        }
        i = r + 1;
    }
    return out;
}

std::vector<std::size_t> select_separated(std::span<const double> x, std::vector<std::size_t> cand, double sign,
                                          double min_sep) {
    std::stable_sort(cand.begin(), cand.end(),
                     [&](std::size_t a, std::size_t b) { return sign * x[a] > sign * x[b]; });
    std::set<std::size_t> kept;
    for (const std::size_t c : cand) {
        auto hi = kept.lower_bound(c);
        bool ok = true;
        if (hi != kept.end() && static_cast<double>(*hi - c) < min_sep) ok = false;
        if (ok && hi != kept.begin() && static_cast<double>(c - *std::prev(hi)) < min_sep) ok = false;
        if (ok) kept.insert(c);
    }
    return {kept.begin(), kept.end()};
}

struct DrawContext {
    std::span<const double> maxima;
    std::span<const double> minima;
    ResampleMode mode;
    std::uint64_t seed;
};

double poisson(double mean, Engine& rng) {
    if (!(mean > 0.0)) return 0.0;
    std::poisson_distribution<long long> d(mean);
    return static_cast<double>(d(rng));
}

// Fills samples[begin, end) for chunk `c`; NaN marks a degenerate draw.
void draw_chunk(const DrawContext& ctx, std::size_t c, std::size_t n_samples, std::vector<double>& samples) {
    auto rng = make_engine(ctx.seed, kChunkStreamBase + c);
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(n_samples, begin + kChunk);
    std::uniform_int_distribution<std::size_t> pick_max(0, ctx.maxima.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_min(0, ctx.minima.size() - 1);
    for (std::size_t k = begin; k < end; ++k) {
        double hi = 0.0, lo = 0.0;
        if (ctx.mode == ResampleMode::paired) {
            hi = poisson(ctx.maxima[pick_max(rng)], rng);
            lo = poisson(ctx.minima[pick_min(rng)], rng);
        } else {
            for (const double m : ctx.maxima) hi += poisson(m, rng);
            for (const double m : ctx.minima) lo += poisson(m, rng);
            hi /= static_cast<double>(ctx.maxima.size());
            lo /= static_cast<double>(ctx.minima.size());
        }
        samples[k] = hi + lo > 0.0 ? (hi - lo) / (hi + lo) : std::numeric_limits<double>::quiet_NaN();
    }
}

void validate_mc(std::span<const double> maxima, std::span<const double> minima, const MonteCarloOptions& o) {
    if (maxima.empty() || minima.empty()) throw DegenerateInputError("Monte-Carlo visibility needs maxima and minima");
    if (o.n_samples < 10'000) throw DomainError("Monte-Carlo visibility needs at least 1e4 samples");
    for (const double v : maxima) if (!(v >= 0.0)) throw DomainError("extremum values must be >= 0");
    for (const double v : minima) if (!(v >= 0.0)) throw DomainError("extremum values must be >= 0");
}

VisibilityEstimate summarize(std::span<const double> maxima, std::span<const double> minima,
                             const MonteCarloOptions& o, std::vector<double> raw) {
    VisibilityEstimate est;
    est.n_maxima = maxima.size();
    est.n_minima = minima.size();
    est.max_mean = std::accumulate(maxima.begin(), maxima.end(), 0.0) / static_cast<double>(maxima.size());
    est.min_mean = std::accumulate(minima.begin(), minima.end(), 0.0) / static_cast<double>(minima.size());
    est.point = est.max_mean + est.min_mean > 0.0 ? visibility(est.max_mean, est.min_mean) : 0.0;

    est.samples.reserve(raw.size());
    for (const double v : raw) {
        if (std::isnan(v)) ++est.degenerate_draws;
        else est.samples.push_back(v);
    }
    if (est.samples.empty()) throw DegenerateInputError("every Monte-Carlo draw had zero counts");
    const double n = static_cast<double>(est.samples.size());
    const double mean = std::accumulate(est.samples.begin(), est.samples.end(), 0.0) / n;
    double ss = 0.0;
    for (const double v : est.samples) ss += (v - mean) * (v - mean);
    est.std = est.samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    est.out_of_range = mean < 0.0 || mean > 1.0;
    est.mean = std::clamp(mean, 0.0, 1.0);

    Histogram& h = est.histogram;
    const double smallest = *std::min_element(est.samples.begin(), est.samples.end());
    h.lo = std::min(0.0, std::floor(smallest * 100.0) / 100.0);
    h.hi = 1.0;
    h.counts.assign(std::max<std::size_t>(o.histogram_bins, 1), 0);
    const double width = (h.hi - h.lo) / static_cast<double>(h.counts.size());
    for (const double v : est.samples) {
        auto b = static_cast<std::size_t>((v - h.lo) / width);
        h.counts[std::min(b, h.counts.size() - 1)] += 1;
    }
    return est;
}

struct LinearSolution {
    double offset, a, b, rss;
};

// Fixed-period linear least squares for offset + a cos + b sin.
LinearSolution solve_linear(std::span<const double> y, double period) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d aty = Eigen::Vector3d::Zero();
    const double w = 2.0 * std::numbers::pi / period;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const Eigen::Vector3d row(1.0, std::cos(w * static_cast<double>(i)), std::sin(w * static_cast<double>(i)));
        ata += row * row.transpose();
        aty += row * y[i];
    }
    const Eigen::Vector3d p = ata.ldlt().solve(aty);
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - p[0] - p[1] * std::cos(w * static_cast<double>(i)) - p[2] * std::sin(w * static_cast<double>(i));
        rss += r * r;
    }
    return {p[0], p[1], p[2], rss};
}

double rss_of(std::span<const double> y, const Eigen::Vector4d& p) {
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - p[0] - p[1] * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / p[2] + p[3]);
        rss += r * r;
    }
    return rss;
}

}  // namespace

double expected_period_bins(double lambda_p, double v_m, double fold_factor, double bin_duration) {
    if (!(lambda_p > 0.0) || !(v_m > 0.0) || !(fold_factor > 0.0) || !(bin_duration >= 0.0)) {
        throw DomainError("expected_period_bins needs positive wavelength, velocity and fold factor");
    }
    if (bin_duration == 0.0) return std::numeric_limits<double>::infinity();
    return lambda_p / (fold_factor * v_m) / bin_duration;
}

double Extrema::max_mean() const { return mean_of(maxima); }
double Extrema::min_mean() const { return mean_of(minima); }

Extrema find_extrema(std::span<const double> counts, double expected_period_bins) {
    if (!(expected_period_bins >= 4.0)) throw DomainError("expected period must be at least 4 bins");
    Extrema out;
    if (static_cast<double>(counts.size()) < expected_period_bins) {
        diag::warn("find_extrema: trace shorter than one fringe period");
        return out;
    }
    const double min_sep = expected_period_bins / 2.0;
    const auto reach = static_cast<std::size_t>(expected_period_bins / 4.0);
    const auto maxima = select_separated(counts, candidates(counts, +1.0, reach), +1.0, min_sep);
    const auto minima = select_separated(counts, candidates(counts, -1.0, reach), -1.0, min_sep);

    struct Item {
        std::size_t index;
        bool is_max;
    };
    std::vector<Item> merged;
    merged.reserve(maxima.size() + minima.size());
    std::size_t a = 0, b = 0;
    while (a < maxima.size() || b < minima.size()) {
        if (b == minima.size() || (a < maxima.size() && maxima[a] < minima[b])) merged.push_back({maxima[a++], true});
        else merged.push_back({minima[b++], false});
    }
    std::vector<Item> alt;
    for (const Item& it : merged) {
        if (!alt.empty() && alt.back().is_max == it.is_max) {
            const double prev = counts[alt.back().index];
            const double cur = counts[it.index];
            if (it.is_max ? cur > prev : cur < prev) alt.back() = it;
            continue;
        }
        alt.push_back(it);
    }
    for (const Item& it : alt) {
        if (it.is_max) {
            out.max_index.push_back(it.index);
            out.maxima.push_back(counts[it.index]);
        } else {
            out.min_index.push_back(it.index);
            out.minima.push_back(counts[it.index]);
        }
    }
    return out;
}

double visibility(double max_mean, double min_mean) {
    const double denom = max_mean + min_mean;
    if (denom == 0.0) throw DegenerateInputError("visibility undefined for max + min = 0");
    return (max_mean - min_mean) / denom;
}

VisibilityEstimate monte_carlo_visibility(std::span<const double> maxima, std::span<const double> minima,
                                          const MonteCarloOptions& options) {
    validate_mc(maxima, minima, options);
    const DrawContext ctx{maxima, minima, options.mode, options.seed};
    std::vector<double> raw(options.n_samples);
    const std::size_t n_chunks = (options.n_samples + kChunk - 1) / kChunk;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c) {
        draw_chunk(ctx, static_cast<std::size_t>(c), options.n_samples, raw);
    }
    return summarize(maxima, minima, options, std::move(raw));
}

VisibilityEstimate monte_carlo_visibility_serial(std::span<const double> maxima, std::span<const double> minima,
                                                 const MonteCarloOptions& options) {
    validate_mc(maxima, minima, options);
    const DrawContext ctx{maxima, minima, options.mode, options.seed};
    std::vector<double> raw(options.n_samples);
    const std::size_t n_chunks = (options.n_samples + kChunk - 1) / kChunk;
    for (std::size_t c = 0; c < n_chunks; ++c) draw_chunk(ctx, c, options.n_samples, raw);
    return summarize(maxima, minima, options, std::move(raw));
}

double shot_noise_visibility_error(double mu_max, double mu_min) {
    if (!(mu_max >= 0.0) || !(mu_min >= 0.0)) throw DomainError("Poisson means must be >= 0");
    const double s = mu_max + mu_min;
    if (s == 0.0) throw DegenerateInputError("shot-noise error undefined for zero counts");
    return 2.0 * std::sqrt(mu_min * mu_min * mu_max + mu_max * mu_max * mu_min) / (s * s);
}

CosineFit fit_cosine(std::span<const double> y, double initial_period) {
    if (!(initial_period > 0.0)) throw DomainError("initial period must be > 0");
    if (static_cast<double>(y.size()) < 2.0 * initial_period) {
        throw DomainError("cosine fit needs at least two periods of data");
    }
    CosineFit fit;
    const double n = static_cast<double>(y.size());

    // grid search; step well below the RSS valley width ~ period^2 / n
    double best_period = initial_period;
    LinearSolution best = solve_linear(y, initial_period);
    constexpr int kSteps = 800;
    for (int k = -kSteps / 2; k <= kSteps / 2; ++k) {
        const double p = initial_period * (1.0 + 0.4 * k / kSteps);
        const LinearSolution s = solve_linear(y, p);
        if (s.rss < best.rss) {
            best = s;
            best_period = p;
        }
    }

    const double amp0 = std::hypot(best.a, best.b);
    const double scale = std::max({std::abs(best.offset), amp0, 1e-300});
    if (amp0 <= 1e-12 * scale) {
        fit.offset = best.offset;
        fit.period = initial_period;
        fit.residual = std::sqrt(best.rss / n);
        fit.converged = true;
        return fit;
    }

    Eigen::Vector4d p(best.offset, amp0, best_period, std::atan2(-best.b, best.a));
    double rss = rss_of(y, p);
    double lambda = 1e-3;
    constexpr std::size_t kMaxIter = 200;
    for (std::size_t it = 0; it < kMaxIter; ++it) {
        fit.iterations = it + 1;
        Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
        Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double x = static_cast<double>(i);
            const double arg = 2.0 * std::numbers::pi * x / p[2] + p[3];
            const double c = std::cos(arg), s = std::sin(arg);
            const Eigen::Vector4d j(1.0, c, p[1] * s * 2.0 * std::numbers::pi * x / (p[2] * p[2]), -p[1] * s);
            const double r = y[i] - p[0] - p[1] * c;
            jtj += j * j.transpose();
            jtr += j * r;
        }
        bool improved = false;
        for (int attempt = 0; attempt < 20 && !improved; ++attempt) {
            Eigen::Matrix4d a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
            const Eigen::Vector4d step = a.ldlt().solve(jtr);
            const Eigen::Vector4d trial = p + step;
            const double trial_rss = rss_of(y, trial);
            if (std::isfinite(trial_rss) && trial_rss <= rss) {
                const double rel = (rss - trial_rss) / std::max(rss, 1e-300);
                const double step_rel = (step.cwiseAbs().array() / (p.cwiseAbs().array() + 1e-300)).maxCoeff();
                p = trial;
                rss = trial_rss;
                lambda = std::max(lambda / 10.0, 1e-12);
                improved = true;
                if (rel < 1e-14 || step_rel < 1e-13 || rss <= 1e-28 * scale * scale * n) fit.converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!improved) {
            // no downhill step left: at a minimum to working precision
            fit.converged = true;
        }
        if (fit.converged) break;
    }

    if (p[1] < 0.0) {
        p[1] = -p[1];
        p[3] += std::numbers::pi;
    }
    fit.offset = p[0];
    fit.amplitude = p[1];
    fit.period = p[2];
    const double two_pi = 2.0 * std::numbers::pi;
    fit.phase = std::fmod(std::fmod(p[3], two_pi) + two_pi, two_pi);
    fit.residual = std::sqrt(rss / n);
    return fit;
}

double LinearFit::distance_at(double y) const {
    if (slope == 0.0) {
        if (y == intercept) return 0.0;
        return y < intercept ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
    }
    return (y - intercept) / slope;
}

LinearFit linear_visibility_extrapolation(std::span<const DistancePoint> points) {
    if (points.size() < 2) throw DomainError("linear extrapolation needs at least two points");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.distance;
        my += p.visibility;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.distance - mx) * (p.distance - mx);
        sxy += (p.distance - mx) * (p.visibility - my);
    }
    if (sxx == 0.0) throw DegenerateInputError("all extrapolation points share one distance");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

TraceAnalysis analyze_trace(const FringeTrace& trace, const TraceAnalysisOptions& options) {
    TraceAnalysis out;
    out.kind = trace.kind;
    out.period_bins = options.period_bins;
    if (out.period_bins <= 0.0) {
        if (!(trace.pump_wavelength > 0.0) || !(trace.stage_velocity > 0.0) || !(trace.bin_duration > 0.0)) {
            throw DomainError("trace '" + trace.kind +
                              "' lacks wavelength/velocity/bin metadata; pass the fringe period explicitly");
        }
        out.period_bins = expected_period_bins(trace.pump_wavelength, trace.stage_velocity, trace.fold_factor,
                                               trace.bin_duration);
    }
    out.extrema = find_extrema(trace.counts, out.period_bins);
    if (out.extrema.maxima.empty() || out.extrema.minima.empty()) {
        out.degenerate = true;
        out.degenerate_reason = "no fringe extrema found";
    } else if (out.extrema.max_mean() + out.extrema.min_mean() == 0.0) {
        out.degenerate = true;
        out.degenerate_reason = "extrema carry zero counts";
    } else {
        out.estimate = monte_carlo_visibility(out.extrema.maxima, out.extrema.minima, options.monte_carlo);
        out.shot_noise_error = shot_noise_visibility_error(out.extrema.max_mean(), out.extrema.min_mean());
    }
    if (options.fit && static_cast<double>(trace.counts.size()) >= 2.0 * out.period_bins) {
        out.fit = fit_cosine(trace.counts, out.period_bins);
    }
    return out;
}

}  // namespace pathid::analysis
