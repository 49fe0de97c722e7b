#include "pathid/beam_optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pathid/diagnostics.hpp"
#include "pathid/error.hpp"

namespace pathid::optics {

void GaussianBeam::validate() const {
    if (!(wavelength > 0.0)) throw ValidationError("wavelength", "must be > 0");
    if (!(waist_radius > 0.0)) throw ValidationError("waist_radius", "must be > 0");
}

void FocusingElement::validate() const {
    if (!(focal_length > 0.0)) throw ValidationError("focal_length", "must be > 0");
    if (!(aperture_diameter > 0.0)) throw ValidationError("aperture", "must be > 0");
}

double rayleigh_length(const GaussianBeam& beam) {
    beam.validate();
    return std::numbers::pi * beam.waist_radius * beam.waist_radius / beam.wavelength;
}

double beam_radius_at(const GaussianBeam& beam, double z) {
    const double u = (z - beam.waist_position) / rayleigh_length(beam);
    return beam.waist_radius * std::sqrt(1.0 + u * u);
}

GaussianBeam conjugate_waist(const GaussianBeam& beam, const FocusingElement& element) {
    beam.validate();
    element.validate();
    const double w_out = element.focal_length * beam.wavelength / (std::numbers::pi * beam.waist_radius);
    const double ratio = std::max(w_out, beam.waist_radius) / std::min(w_out, beam.waist_radius);
    if (ratio < 10.0) {
        diag::warn("conjugate_waist: input and output waists differ by only " + std::to_string(ratio) +
                   "x; far-field imaging assumption is marginal");
    }
    return {beam.wavelength, w_out, beam.waist_position + 2.0 * element.focal_length};
}

double matched_spdc_focal_parameter(double xi_pump) {
    if (!(xi_pump > 0.0)) throw DomainError("pump focal parameter must be > 0");
    return std::sqrt(2.84 * xi_pump);
}

ApertureResult aperture_check(const GaussianBeam& beam, double z, double aperture_diameter) {
    if (!(aperture_diameter > 0.0)) throw DomainError("aperture diameter must be > 0");
    const double ratio = 2.0 * beam_radius_at(beam, z) / aperture_diameter;
    return {ratio <= 1.0, ratio};
}

double peak_intensity(double power_w, double waist_m) {
    if (!(power_w >= 0.0)) throw DomainError("power must be >= 0");
    if (!(waist_m > 0.0)) throw DomainError("waist must be > 0");
    constexpr double m2_per_cm2 = 1e-4;
    return 2.0 * power_w / (std::numbers::pi * waist_m * waist_m) * m2_per_cm2;
}

double divergence_half_angle(const GaussianBeam& beam) {
    beam.validate();
    return beam.wavelength / (std::numbers::pi * beam.waist_radius);
}

}  // namespace pathid::optics
