#pragma once

namespace pathid::rates {

// Two-crystal coincidence fringe
//   C_c = |A|^2 I_p f_s f_i [1 + V_p V_c cos(k_p dL + dPhi)]
// with degenerate signal/idler (k_avg = 0).
struct RateParams {
    double amp_sq = 0.0;          // |A|^2, counts cm^2 / (W s)
    double pump_intensity = 0.0;  // W/cm^2
    double spectral_s = 1.0;
    double spectral_i = 1.0;
    double vis_pump = 1.0;        // V_p
    double vis_contrast = 1.0;    // V_c
    double k_pump = 0.0;          // 1/m
    double delta_L = 0.0;         // m
    double delta_Phi = 0.0;       // rad

    double mean_rate() const noexcept { return amp_sq * pump_intensity * spectral_s * spectral_i; }
    void validate() const;
};

struct DetectorParams {
    double efficiency_s = 1.0;
    double efficiency_i = 1.0;
    double dark_rate = 0.0;                    // counts/s per channel
    double coincidence_window = 1.5e-9;        // s, total window width t_c
    double integration_time = 70e-3;           // s
    double singles_background_fraction = 0.0;  // non-pair fraction of (non-dark) singles

    void validate() const;
};

double coincidence_rate(const RateParams& params);

// Stage travel per 2 pi of k_p dL.
double fringe_period_in_stage_travel(double lambda_p, double fold_factor);

// C_A C_B t_c
double accidental_rate(double singles_a, double singles_b, double t_c);

// C_A C_B / C_c
double brightness(double singles_a, double singles_b, double coincidences);

// Singles from one detector: the mean non-dark level is efficiency * pair_rate
// / (1 - background_fraction), modulated with contrast `singles_visibility`,
// plus dark counts.
double singles_rate(double pair_rate, double efficiency, double background_fraction, double dark_rate,
                    double phase, double singles_visibility);

// Background fraction that turns a pair-derived fringe of contrast
// `pair_visibility` into singles of contrast `singles_visibility`.
double background_fraction_for_visibility(double pair_visibility, double singles_visibility);

}  // namespace pathid::rates
