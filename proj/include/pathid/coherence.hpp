#pragma once

#include <string_view>

namespace pathid::coherence {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

enum class Lineshape { lorentzian, gaussian };

Lineshape parse_lineshape(std::string_view name);
std::string_view to_string(Lineshape shape) noexcept;

struct SourceSpectrum {
    double center_wavelength = 0.0;  // m
    double fwhm_bandwidth = 0.0;     // Hz
    Lineshape lineshape = Lineshape::lorentzian;
};

// Path lengths for the two coherence conditions. Every length is measured as
// excess optical path over the free-space link shared by pump and
// down-converted beams; see README "Path length convention".
struct PathLayout {
    double pump_path = 0.0;     // L_p
    double dc_path_a = 0.0;     // L_DC^a (signal mode)
    double dc_path_b = 0.0;     // L_DC^b (idler mode)
    double pump_coh_len = 0.0;  // L_p^coh
    double dc_coh_len = 0.0;    // L_DC^coh

    void validate() const;
};

struct ConditionResult {
    bool satisfied = false;
    double margin = 0.0;  // m; >= 0 iff satisfied
};

// Lorentzian: 1/(pi dnu). Gaussian: sqrt(2 ln2 / pi) / dnu.
double coherence_time(const SourceSpectrum& spectrum);

double coherence_length(double coherence_time_s);

// |L_p - L_a - L_b| <= L_p^coh
ConditionResult pump_condition(const PathLayout& layout);

// |L_a - L_b| <= L_DC^coh
ConditionResult dc_condition(const PathLayout& layout);

// Pump coherence visibility factor V_p for a given path mismatch. Model choice:
// Lorentzian -> exp(-|x|/l), Gaussian -> exp(-(x/l)^2).
double pump_coherence_factor(double mismatch, double coh_len, Lineshape lineshape = Lineshape::lorentzian);

}  // namespace pathid::coherence
