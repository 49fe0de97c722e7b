#include "pathid/coherence.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pathid/error.hpp"

namespace pathid::coherence {

Lineshape parse_lineshape(std::string_view name) {
    if (name == "lorentzian") return Lineshape::lorentzian;
    if (name == "gaussian") return Lineshape::gaussian;
    throw ParseError("unknown lineshape '" + std::string(name) + "' (expected lorentzian|gaussian)");
}

std::string_view to_string(Lineshape shape) noexcept {
    return shape == Lineshape::lorentzian ? "lorentzian" : "gaussian";
}

void PathLayout::validate() const {
    if (!(pump_path >= 0.0)) throw ValidationError("pump_path", "must be >= 0");
    if (!(dc_path_a >= 0.0)) throw ValidationError("dc_path_a", "must be >= 0");
    if (!(dc_path_b >= 0.0)) throw ValidationError("dc_path_b", "must be >= 0");
    if (!(pump_coh_len > 0.0)) throw ValidationError("pump_coherence_length", "must be > 0");
    if (!(dc_coh_len > 0.0)) throw ValidationError("dc_coherence_length", "must be > 0");
}

double coherence_time(const SourceSpectrum& spectrum) {
    if (!(spectrum.fwhm_bandwidth > 0.0)) throw DomainError("bandwidth must be > 0");
    if (!(spectrum.center_wavelength > 0.0)) throw DomainError("center wavelength must be > 0");
    if (std::isinf(spectrum.fwhm_bandwidth)) return 0.0;
    switch (spectrum.lineshape) {
        case Lineshape::lorentzian:
            return 1.0 / (std::numbers::pi * spectrum.fwhm_bandwidth);
        case Lineshape::gaussian:
            return std::sqrt(2.0 * std::numbers::ln2 / std::numbers::pi) / spectrum.fwhm_bandwidth;
    }
    return 0.0;
}

double coherence_length(double coherence_time_s) {
    if (!(coherence_time_s > 0.0)) throw DomainError("coherence time must be > 0");
    return kSpeedOfLight * coherence_time_s;
}

ConditionResult pump_condition(const PathLayout& layout) {
    const double mismatch = std::abs(layout.pump_path - layout.dc_path_a - layout.dc_path_b);
    const double margin = layout.pump_coh_len - mismatch;
    return {margin >= 0.0, margin};
}

ConditionResult dc_condition(const PathLayout& layout) {
    const double mismatch = std::abs(layout.dc_path_a - layout.dc_path_b);
    const double margin = layout.dc_coh_len - mismatch;
    return {margin >= 0.0, margin};
}

double pump_coherence_factor(double mismatch, double coh_len, Lineshape lineshape) {
    if (!(coh_len > 0.0)) throw DomainError("coherence length must be > 0");
    const double x = std::abs(mismatch) / coh_len;
    if (std::isinf(x)) return 0.0;
    return lineshape == Lineshape::lorentzian ? std::exp(-x) : std::exp(-x * x);
}

}  // namespace pathid::coherence
