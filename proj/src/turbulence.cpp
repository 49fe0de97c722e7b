#include "pathid/turbulence.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pathid/error.hpp"
#include "pathid/random.hpp"

namespace pathid::turbulence {

namespace {

enum Stream : std::uint64_t { angle_stream = 11, phase_stream = 12 };

// Fills `out` with an AR(1) path of stationary std `sigma`.
void ar1_path(std::vector<double>& out, double sigma, double rho, Engine& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double innovation = sigma * std::sqrt(1.0 - rho * rho);
    double x = sigma * normal(rng);
    for (auto& v : out) {
        v = x;
        x = rho * x + innovation * normal(rng);
    }
}

}  // namespace

void TurbulenceModel::validate() const {
    if (!(sigma_angle >= 0.0)) throw ValidationError("turbulence.sigma_angle", "must be >= 0");
    if (!(angle_scale > 0.0)) throw ValidationError("turbulence.angle_scale", "must be > 0");
    if (!(sigma_phase >= 0.0)) throw ValidationError("turbulence.sigma_phase", "must be >= 0");
    if (!(correlation_time > 0.0)) throw ValidationError("turbulence.correlation_time", "must be > 0");
    if (!(distance >= 0.0)) throw ValidationError("distance", "must be >= 0");
}

double coupling_efficiency(double theta, double theta0) {
    if (!(theta0 > 0.0)) throw DomainError("angle scale must be > 0");
    const double u = theta / theta0;
    return std::exp(-u * u);
}

GainSeries sample_gain_series(const TurbulenceModel& model, double base_gain, std::size_t n_bins,
                              double bin_duration, std::uint64_t seed) {
    model.validate();
    if (n_bins == 0) throw DomainError("n_bins must be > 0");
    if (!(bin_duration > 0.0)) throw DomainError("bin_duration must be > 0");
    if (!(base_gain >= 0.0)) throw DomainError("base gain must be >= 0");

    GainSeries series;
    series.bin_duration = bin_duration;
    series.gain.assign(n_bins, base_gain);
    series.phase_offset.assign(n_bins, 0.0);

    const double rho = std::exp(-bin_duration / model.correlation_time);
    if (model.sigma_angle > 0.0) {
        auto rng = make_engine(seed, angle_stream);
        std::vector<double> theta(n_bins);
        ar1_path(theta, model.sigma_angle, rho, rng);
        for (std::size_t k = 0; k < n_bins; ++k) {
            series.gain[k] = base_gain * std::sqrt(coupling_efficiency(theta[k], model.angle_scale));
        }
    }
    if (model.sigma_phase > 0.0) {
        auto rng = make_engine(seed, phase_stream);
        ar1_path(series.phase_offset, model.sigma_phase, rho, rng);
    }
    return series;
}

DistanceCalibration::DistanceCalibration(std::vector<std::pair<double, double>> anchors)
    : anchors_(std::move(anchors)) {
    std::sort(anchors_.begin(), anchors_.end());
    for (const auto& [d, s] : anchors_) {
        if (!(d >= 0.0) || !(s >= 0.0)) {
            throw ValidationError("turbulence.calibration", "anchors must be nonnegative");
        }
    }
}

double sigma_from_distance(double distance, const DistanceCalibration& calibration) {
    const auto& a = calibration.anchors();
    if (a.empty()) throw DomainError("turbulence calibration has no anchors");
    if (distance <= a.front().first) return a.front().second;
    if (distance >= a.back().first) return a.back().second;
    auto hi = std::upper_bound(a.begin(), a.end(), distance,
                               [](double d, const auto& anchor) { return d < anchor.first; });
    auto lo = std::prev(hi);
    const double t = (distance - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

}  // namespace pathid::turbulence
