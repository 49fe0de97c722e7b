#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace pathid::turbulence {

// Slow free-space degradation of the link between the two crystals.
//
// The pump's arrival angle at the second crystal is a stationary AR(1)
// process; the second process's gain follows the square root of the Gaussian
// mode-overlap efficiency at that angle. An independent AR(1) phase offset
// models interferometer and air-path phase noise.
struct TurbulenceModel {
    double sigma_angle = 0.0;        // rad, stationary std of the arrival angle
    double angle_scale = 1.0;        // rad, 1/e half-width theta0 of the coupling
    double sigma_phase = 0.0;        // rad, stationary std of the phase offset
    double correlation_time = 0.1;   // s
    double distance = 0.0;           // m

    void validate() const;
};

struct GainSeries {
    std::vector<double> gain;          // effective g2 per bin
    std::vector<double> phase_offset;  // rad per bin
    double bin_duration = 0.0;         // s
};

// exp(-(theta/theta0)^2)
double coupling_efficiency(double theta, double theta0);

// AR(1) samples with stationary std `sigma` and lag-one correlation
// exp(-step/correlation_time); the first sample is drawn from the stationary law.
GainSeries sample_gain_series(const TurbulenceModel& model, double base_gain, std::size_t n_bins,
                              double bin_duration, std::uint64_t seed);

// Piecewise-linear map from link distance to sigma_angle, clamped at both ends.
class DistanceCalibration {
public:
    DistanceCalibration() = default;
    explicit DistanceCalibration(std::vector<std::pair<double, double>> anchors);

    bool empty() const noexcept { return anchors_.empty(); }
    const std::vector<std::pair<double, double>>& anchors() const noexcept { return anchors_; }

private:
    std::vector<std::pair<double, double>> anchors_;  // sorted by distance
};

double sigma_from_distance(double distance, const DistanceCalibration& calibration);

}  // namespace pathid::turbulence
