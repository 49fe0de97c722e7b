#pragma once

// Visibility statistics of binned fringe traces: period-aware extrema
// detection, Poisson Monte-Carlo visibility distributions, closed-form
// shot-noise propagation, cosine fitting and linear distance extrapolation.

#include <cstdint>
#include <span>
#include <vector>

#include "pathid/fringe_trace.hpp"

namespace pathid::analysis {

// (lambda_p / (fold v_m)) / bin_duration
double expected_period_bins(double lambda_p, double v_m, double fold_factor, double bin_duration);

struct Extrema {
    std::vector<std::size_t> max_index;
    std::vector<std::size_t> min_index;
    std::vector<double> maxima;
    std::vector<double> minima;

    double max_mean() const;
    double min_mean() const;
};

// Local extrema (plateaus resolve to their earliest bin, trace endpoints are
// never extrema) that are also the extreme within a quarter period on either
// side. Candidates are accepted greedily by height subject to a minimum
// separation of half the expected period, then reduced so maxima and minima
// alternate along the trace.
Extrema find_extrema(std::span<const double> counts, double expected_period_bins);

// (max - min) / (max + min), unclamped.
double visibility(double max_mean, double min_mean);

enum class ResampleMode {
    // each draw pairs one randomly chosen maximum with one randomly chosen
    // minimum; the distribution width is the single-extremum spread
    paired,
    // each draw resamples every extremum and uses the means; the width is the
    // uncertainty of the pooled means
    pooled,
};

struct MonteCarloOptions {
    std::size_t n_samples = 100'000;
    std::uint64_t seed = 1;
    ResampleMode mode = ResampleMode::paired;
    std::size_t histogram_bins = 100;
};

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;
};

struct VisibilityEstimate {
    double mean = 0.0;   // sample mean of the draws, clamped to [0, 1]
    double std = 0.0;    // sample standard deviation of the draws
    double point = 0.0;  // visibility of the observed extremum means, unclamped
    double max_mean = 0.0;
    double min_mean = 0.0;
    bool out_of_range = false;  // raw sample mean fell outside [0, 1]
    std::size_t n_maxima = 0;
    std::size_t n_minima = 0;
    std::size_t degenerate_draws = 0;  // draws with max + min == 0, excluded
    std::vector<double> samples;
    Histogram histogram;
};

// OpenMP over fixed-size chunks with per-chunk engines, so the result does not
// depend on the thread count and equals monte_carlo_visibility_serial bit for bit.
VisibilityEstimate monte_carlo_visibility(std::span<const double> maxima, std::span<const double> minima,
                                          const MonteCarloOptions& options = {});
VisibilityEstimate monte_carlo_visibility_serial(std::span<const double> maxima, std::span<const double> minima,
                                                 const MonteCarloOptions& options = {});

// Gaussian propagation of sqrt(n) Poisson errors through (M - m)/(M + m):
// 2 sqrt(m^2 M + M^2 m) / (M + m)^2.
double shot_noise_visibility_error(double mu_max, double mu_min);

struct CosineFit {
    double offset = 0.0;
    double amplitude = 0.0;
    double period = 0.0;  // bins
    double phase = 0.0;   // rad in [0, 2pi)
    double residual = 0.0;  // RMS
    std::size_t iterations = 0;
    bool converged = false;

    double visibility() const { return offset > 0.0 ? amplitude / offset : 0.0; }
};

// Least-squares fit of offset + amplitude cos(2 pi i / period + phase) over bin
// index i, refined by Levenberg-Marquardt from a grid search around
// `initial_period`.
CosineFit fit_cosine(std::span<const double> counts, double initial_period);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;

    double value_at(double x) const { return intercept + slope * x; }
    // x where the line reaches y; +inf if a flat line never descends to y,
    // NaN if it never rises to y.
    double distance_at(double y) const;
};

struct DistancePoint {
    double distance = 0.0;
    double visibility = 0.0;
};

LinearFit linear_visibility_extrapolation(std::span<const DistancePoint> points);

// End-to-end analysis of one trace.
struct TraceAnalysisOptions {
    double period_bins = 0.0;  // 0: derive from trace metadata
    MonteCarloOptions monte_carlo;
    bool fit = true;
};

struct TraceAnalysis {
    std::string kind;
    double period_bins = 0.0;
    Extrema extrema;
    VisibilityEstimate estimate;
    double shot_noise_error = 0.0;
    CosineFit fit;
    bool degenerate = false;
    std::string degenerate_reason;
};

TraceAnalysis analyze_trace(const FringeTrace& trace, const TraceAnalysisOptions& options = {});

}  // namespace pathid::analysis
