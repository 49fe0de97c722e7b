#pragma once

// Paraxial, ideal-Gaussian, thin-element beam transport.

namespace pathid::optics {

struct GaussianBeam {
    double wavelength = 0.0;      // m
    double waist_radius = 0.0;    // m, 1/e^2 intensity radius
    double waist_position = 0.0;  // m along the propagation axis

    void validate() const;
};

struct FocusingElement {
    double focal_length = 0.0;       // m
    double aperture_diameter = 0.0;  // m

    void validate() const;
};

struct ApertureResult {
    bool pass = false;
    double ratio = 0.0;  // beam diameter / aperture diameter
};

// pi w0^2 / lambda
double rayleigh_length(const GaussianBeam& beam);

// w0 sqrt(1 + ((z - z0)/zR)^2)
double beam_radius_at(const GaussianBeam& beam, double z);

// Waist produced by a thin element placed one focal length after the incoming
// waist: w_out = f lambda / (pi w_in), located one focal length behind the
// element. The same map collimates a tight focus and focuses a collimated
// beam. Warns when input and output waists are within a factor 10 of each
// other (the incoming beam is then not in the element's far field).
GaussianBeam conjugate_waist(const GaussianBeam& beam, const FocusingElement& element);

// Bennink-style matched SPDC focal parameter: sqrt(2.84 xi_p).
double matched_spdc_focal_parameter(double xi_pump);

ApertureResult aperture_check(const GaussianBeam& beam, double z, double aperture_diameter);

// Gaussian peak intensity 2P/(pi w0^2), returned in W/cm^2.
double peak_intensity(double power_w, double waist_m);

// Far-field 1/e^2 half-angle divergence lambda / (pi w0).
double divergence_half_angle(const GaussianBeam& beam);

}  // namespace pathid::optics
