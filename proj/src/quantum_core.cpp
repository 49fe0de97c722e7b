#include "pathid/quantum_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pathid/diagnostics.hpp"
#include "pathid/error.hpp"

namespace pathid::quantum {

namespace {

void require_gain(double g, const char* name) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
        throw DomainError(std::string(name) + " must be a finite nonnegative gain, got " +
                          std::to_string(g));
    }
}

}  // namespace

double reduce_phase(double phi) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(phi, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

SpdcProcess::SpdcProcess(double gain, double phase, double pump_wavelength, double crystal_length,
                         double warn_threshold)
    : gain_(gain), phase_(reduce_phase(phase)), pump_wavelength_(pump_wavelength),
      crystal_length_(crystal_length) {
    require_gain(gain, "gain");
    if (!(pump_wavelength > 0.0)) throw DomainError("pump_wavelength must be > 0");
    if (!(crystal_length > 0.0)) throw DomainError("crystal_length must be > 0");
    if (gain > warn_threshold) {
        diag::warn("SPDC gain " + std::to_string(gain) + " exceeds low-gain validity threshold " +
                   std::to_string(warn_threshold));
    }
}

double TwoModeState::norm_squared() const noexcept {
    return std::norm(amp_vac) + std::norm(amp_pair) + std::norm(amp_double);
}

TwoModeState TwoModeState::normalized() const {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw DegenerateInputError("cannot normalize a zero state");
    const double s = 1.0 / std::sqrt(n2);
    return {amp_vac * s, amp_pair * s, amp_double * s};
}

Complex superposed_pair_amplitude(double g1, double g2, double phi) {
    require_gain(g1, "g1");
    require_gain(g2, "g2");
    return g2 + g1 * std::polar(1.0, phi);
}

double emission_probability(double g1, double g2, double phi) {
    require_gain(g1, "g1");
    require_gain(g2, "g2");
    // closed form avoids the cancellation in |g2 + g1 e^{i phi}|^2 near phi = pi
    return g1 * g1 + g2 * g2 + 2.0 * g1 * g2 * std::cos(phi);
}

double fringe_visibility_from_amplitudes(double g1, double g2) {
    require_gain(g1, "g1");
    require_gain(g2, "g2");
    const double denom = g1 * g1 + g2 * g2;
    if (denom == 0.0) throw DegenerateInputError("visibility undefined when both gains are zero");
    return 2.0 * g1 * g2 / denom;
}

TwoModeState truncated_state(double g1, double g2, double phi, bool include_double, bool normalize) {
    TwoModeState s;
    s.amp_pair = superposed_pair_amplitude(g1, g2, phi);
    // at phi = pi with g1 = g2 the polar form leaves ~1e-17 residue; snap it
    if (std::abs(s.amp_pair) <= 1e-15 * (g1 + g2)) s.amp_pair = 0.0;
    if (include_double) s.amp_double = s.amp_pair * s.amp_pair / 2.0;
    return normalize ? s.normalized() : s;
}

}  // namespace pathid::quantum
