#include "pathid/rate_model.hpp"

#include <algorithm>
#include <cmath>

#include "pathid/error.hpp"

namespace pathid::rates {

namespace {

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void RateParams::validate() const {
    if (!(amp_sq >= 0.0)) throw ValidationError("amp_sq", "must be >= 0");
    if (!(pump_intensity >= 0.0)) throw ValidationError("pump_intensity", "must be >= 0");
    if (!(spectral_s >= 0.0) || !(spectral_i >= 0.0)) throw ValidationError("spectral", "must be >= 0");
    if (!unit_interval(vis_pump)) throw ValidationError("vis_pump", "must be in [0, 1]");
    if (!unit_interval(vis_contrast)) throw ValidationError("vis_contrast", "must be in [0, 1]");
}

void DetectorParams::validate() const {
    if (!unit_interval(efficiency_s)) throw ValidationError("detector.efficiency_signal", "must be in [0, 1]");
    if (!unit_interval(efficiency_i)) throw ValidationError("detector.efficiency_idler", "must be in [0, 1]");
    if (!(dark_rate >= 0.0)) throw ValidationError("detector.dark_rate", "must be >= 0");
    if (!(coincidence_window > 0.0)) throw ValidationError("detector.coincidence_window", "must be > 0");
    if (!(integration_time > 0.0)) throw ValidationError("detector.integration_time", "must be > 0");
    if (!(singles_background_fraction >= 0.0 && singles_background_fraction < 1.0)) {
        throw ValidationError("detector.singles_background_fraction", "must be in [0, 1)");
    }
}

double coincidence_rate(const RateParams& params) {
    const double vv = params.vis_pump * params.vis_contrast;
    if (vv > 1.0) throw DomainError("visibility product V_p V_c exceeds 1");
    params.validate();
    const double rate = params.mean_rate() * (1.0 + vv * std::cos(params.k_pump * params.delta_L + params.delta_Phi));
    return std::max(rate, 0.0);
}

double fringe_period_in_stage_travel(double lambda_p, double fold_factor) {
    if (!(lambda_p > 0.0)) throw DomainError("wavelength must be > 0");
    if (!(fold_factor >= 1.0)) throw DomainError("fold_factor must be >= 1");
    return lambda_p / fold_factor;
}

double accidental_rate(double singles_a, double singles_b, double t_c) {
    if (!(singles_a >= 0.0) || !(singles_b >= 0.0) || !(t_c >= 0.0)) {
        throw DomainError("accidental_rate inputs must be >= 0");
    }
    return singles_a * singles_b * t_c;
}

double brightness(double singles_a, double singles_b, double coincidences) {
    if (!(coincidences > 0.0)) throw DomainError("brightness undefined for zero coincidences");
    return singles_a * singles_b / coincidences;
}

double singles_rate(double pair_rate, double efficiency, double background_fraction, double dark_rate,
                    double phase, double singles_visibility) {
    if (!unit_interval(efficiency)) throw DomainError("efficiency must be in [0, 1]");
    if (!(background_fraction >= 0.0 && background_fraction < 1.0)) {
        throw DomainError("background fraction must be in [0, 1)");
    }
    if (!unit_interval(singles_visibility)) throw DomainError("singles visibility must be in [0, 1]");
    const double level = efficiency * pair_rate / (1.0 - background_fraction);
    return level * (1.0 + singles_visibility * std::cos(phase)) + dark_rate;
}

double background_fraction_for_visibility(double pair_visibility, double singles_visibility) {
    if (!(pair_visibility > 0.0)) return 0.0;
    return std::clamp(1.0 - singles_visibility / pair_visibility, 0.0, 1.0 - 1e-12);
}

}  // namespace pathid::rates
