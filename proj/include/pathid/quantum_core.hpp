#pragma once

// Two-source pair-emission amplitudes in the low-gain (truncated) SPDC regime.
//
// Convention: the relative phase factor e^{i phi} multiplies the first
// process's gain, so the |1,1> coefficient after path identity is
// g2 + g1 e^{i phi}. Observables only depend on the relative phase.

#include <complex>

namespace pathid::quantum {

using Complex = std::complex<double>;

inline constexpr double kDefaultGainWarnThreshold = 0.1;

// One nonlinear source. Phase is reduced to [0, 2pi) on construction.
class SpdcProcess {
public:
    SpdcProcess(double gain, double phase, double pump_wavelength, double crystal_length,
                double warn_threshold = kDefaultGainWarnThreshold);

    double gain() const noexcept { return gain_; }
    double phase() const noexcept { return phase_; }
    double pump_wavelength() const noexcept { return pump_wavelength_; }
    double crystal_length() const noexcept { return crystal_length_; }

private:
    double gain_;
    double phase_;
    double pump_wavelength_;
    double crystal_length_;
};

// Coefficients of |0,0>, |1,1> and |2,2> in modes (a, b).
struct TwoModeState {
    Complex amp_vac{1.0, 0.0};
    Complex amp_pair{};
    Complex amp_double{};

    double norm_squared() const noexcept;
    TwoModeState normalized() const;
    double pair_probability() const noexcept { return std::norm(amp_pair); }
};

double reduce_phase(double phi) noexcept;

// First-order |1,1> coefficient of S_2 U_phi S_1 |vac> after path identity.
Complex superposed_pair_amplitude(double g1, double g2, double phi);

// |g2 + g1 e^{i phi}|^2 = g1^2 + g2^2 + 2 g1 g2 cos(phi).
double emission_probability(double g1, double g2, double phi);

// 2 g1 g2 / (g1^2 + g2^2): the phase-scan contrast of emission_probability.
double fringe_visibility_from_amplitudes(double g1, double g2);

// Vacuum + pair (+ optional double-pair) state. The double-pair coefficient uses
// the naive squared-amplitude model amp_pair^2 / 2, not a multimode squeezing
// calculation. Normalized unless `normalize` is false.
TwoModeState truncated_state(double g1, double g2, double phi, bool include_double,
                             bool normalize = true);

}  // namespace pathid::quantum
