#include "pathid/tagsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "pathid/error.hpp"
#include "pathid/random.hpp"

namespace pathid::tagsim {

namespace {

enum Stream : std::uint64_t {
    pair_stream = 21,
    detect_stream = 22,
    jitter_stream = 23,
    signal_noise_stream = 24,
    idler_noise_stream = 25,
};

constexpr int kTruthSubsamples = 32;

void homogeneous_poisson(double rate, double duration, Engine& rng, std::vector<double>& out) {
    if (!(rate > 0.0)) return;
    std::exponential_distribution<double> gap(rate);
    for (double t = gap(rng); t < duration; t += gap(rng)) out.push_back(t);
}

void apply_dead_time(std::vector<Picoseconds>& tags, Picoseconds dead) {
    if (dead == 0 || tags.empty()) return;
    std::size_t keep = 1;
    Picoseconds last = tags.front();
    for (std::size_t k = 1; k < tags.size(); ++k) {
        if (tags[k] - last >= dead) {
            last = tags[k];
            tags[keep++] = tags[k];
        }
    }
    tags.resize(keep);
}

// Bin-wise view of the pair-rate model.
class PairRate {
public:
    PairRate(const ScanModel& m, turbulence::GainSeries series)
        : m_(m), series_(std::move(series)), omega_(m.k_pump() * m.fold_factor * m.stage_velocity) {
        scale_ = m.base_gain > 0.0 ? m.pair_rate_single / (m.base_gain * m.base_gain) : 0.0;
    }

    std::size_t bin_of(double t) const {
        const auto k = static_cast<std::size_t>(std::max(0.0, t / series_.bin_duration));
        return std::min(k, series_.gain.size() - 1);
    }

    double phase(double t) const { return omega_ * t + m_.phase0 + series_.phase_offset[bin_of(t)]; }
    double omega() const { return omega_; }
    double gain(std::size_t bin) const { return series_.gain[bin]; }
    double phase_offset(std::size_t bin) const { return series_.phase_offset[bin]; }

    double operator()(double t) const {
        if (scale_ == 0.0) return 0.0;
        const std::size_t k = bin_of(t);
        const double g1 = m_.base_gain;
        const double g2 = series_.gain[k];
        const double level = g1 * g1 + g2 * g2;
        rates::RateParams p;
        p.amp_sq = scale_;
        p.pump_intensity = level;
        p.vis_pump = m_.vis_pump;
        p.vis_contrast = level > 0.0 ? m_.mode_overlap * 2.0 * g1 * g2 / level : 0.0;
        p.k_pump = m_.k_pump();
        p.delta_L = m_.fold_factor * m_.stage_velocity * t;
        p.delta_Phi = m_.phase0 + series_.phase_offset[k];
        return rates::coincidence_rate(p);
    }

    double bound() const {
        const double g1 = m_.base_gain;
        const double g2 = *std::max_element(series_.gain.begin(), series_.gain.end());
        return scale_ * (g1 + g2) * (g1 + g2) * (1.0 + 1e-12);
    }

private:
    const ScanModel& m_;
    turbulence::GainSeries series_;
    double omega_;
    double scale_ = 0.0;
};

}  // namespace

void ScanModel::validate() const {
    if (!(duration > 0.0)) throw ValidationError("scan.duration", "must be > 0");
    if (!(pump_wavelength > 0.0)) throw ValidationError("pump.center_wavelength", "must be > 0");
    if (!(stage_velocity >= 0.0)) throw ValidationError("scan.stage_velocity", "must be >= 0");
    if (!(fold_factor >= 1.0)) throw ValidationError("scan.fold_factor", "must be >= 1");
    if (!(base_gain >= 0.0)) throw ValidationError("spdc.gain", "must be >= 0");
    if (!(pair_rate_single >= 0.0)) throw ValidationError("spdc.pair_rate", "must be >= 0");
    if (!(mode_overlap >= 0.0 && mode_overlap <= 1.0)) throw ValidationError("spdc.mode_overlap", "must be in [0, 1]");
    if (!(vis_pump >= 0.0 && vis_pump <= 1.0)) throw ValidationError("vis_pump", "must be in [0, 1]");
    if (!(jitter_std >= 0.0)) throw ValidationError("detector.jitter", "must be >= 0");
    if (!(dead_time >= 0.0)) throw ValidationError("detector.dead_time", "must be >= 0");
    turbulence.validate();
    detector.validate();
    if (detector.integration_time > duration) {
        throw ValidationError("detector.integration_time", "longer than the scan duration");
    }
}

double ScanModel::k_pump() const { return 2.0 * std::numbers::pi / pump_wavelength; }

std::size_t ScanModel::n_bins() const {
    return to_ps(duration) / to_ps(detector.integration_time);
}

std::vector<double> thinned_poisson_times(const std::function<double(double)>& rate_fn, double duration,
                                          double rate_max, std::uint64_t seed) {
    if (!(duration >= 0.0)) throw DomainError("duration must be >= 0");
    if (!(rate_max >= 0.0)) throw DomainError("rate_max must be >= 0");
    std::vector<double> out;
    if (rate_max == 0.0 || duration == 0.0) return out;
    auto rng = make_engine(seed, pair_stream);
    std::exponential_distribution<double> gap(rate_max);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (double t = gap(rng); t < duration; t += gap(rng)) {
        const double r = rate_fn(t);
        if (r > rate_max * (1.0 + 1e-9)) {
            throw DomainError("rate function " + std::to_string(r) + " exceeds thinning bound " +
                              std::to_string(rate_max) + " at t=" + std::to_string(t));
        }
        if (uni(rng) * rate_max < r) out.push_back(t);
    }
    return out;
}

double model_pair_visibility(const ScanModel& model) { return model.vis_pump * model.mode_overlap; }

ScanResult simulate_scan(const ScanModel& model, std::uint64_t seed) {
    model.validate();
    const double t_int = model.detector.integration_time;
    const std::size_t n_bins = model.n_bins();
    const auto n_grid = static_cast<std::size_t>(std::ceil(model.duration / t_int - 1e-9));

    const PairRate rate(model, turbulence::sample_gain_series(model.turbulence, model.base_gain,
                                                              std::max<std::size_t>(n_grid, 1), t_int, seed));
    const double eta_s = model.detector.efficiency_s;
    const double eta_i = model.detector.efficiency_i;
    const double bf = model.detector.singles_background_fraction;

    ScanResult result;
    ScanGroundTruth& truth = result.truth;
    truth.bin_duration = t_int;
    truth.pair_rate.resize(n_bins);
    truth.phase.resize(n_bins);
    truth.gain.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        double acc = 0.0;
        for (int k = 0; k < kTruthSubsamples; ++k) {
            acc += rate((static_cast<double>(b) + (k + 0.5) / kTruthSubsamples) * t_int);
        }
        truth.pair_rate[b] = acc / kTruthSubsamples;
        truth.phase[b] = rate.phase((static_cast<double>(b) + 0.5) * t_int);
        truth.gain[b] = rate.gain(b);
    }
    double mean_rate = 0.0;
    for (double r : truth.pair_rate) mean_rate += r;
    truth.mean_pair_rate = n_bins ? mean_rate / static_cast<double>(n_bins) : 0.0;
    truth.background_rate_signal = eta_s * truth.mean_pair_rate * bf / (1.0 - bf);
    truth.background_rate_idler = eta_i * truth.mean_pair_rate * bf / (1.0 - bf);
    const double dark = model.detector.dark_rate;
    truth.expected_coincidences.resize(n_bins);
    truth.expected_signal.resize(n_bins);
    truth.expected_idler.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        truth.expected_coincidences[b] = truth.pair_rate[b] * eta_s * eta_i * t_int;
        truth.expected_signal[b] = (truth.pair_rate[b] * eta_s + truth.background_rate_signal + dark) * t_int;
        truth.expected_idler[b] = (truth.pair_rate[b] * eta_i + truth.background_rate_idler + dark) * t_int;
    }
    if (rate.omega() > 0.0) {
        const double two_pi = 2.0 * std::numbers::pi;
        // offset 0: maxima (phase = 2 pi k); offset pi: minima
        auto crossings = [&](double offset, std::vector<double>& out) {
            const double period = two_pi / rate.omega();
            for (double k = std::floor((model.phase0 - offset) / two_pi);; k += 1.0) {
                double t = (two_pi * k + offset - model.phase0) / rate.omega();
                if (t > model.duration + period) break;
                t -= rate.phase_offset(rate.bin_of(std::max(t, 0.0))) / rate.omega();
                if (t > 0.0 && t < model.duration) out.push_back(t);
            }
        };
        crossings(0.0, truth.fringe_max_times);
        crossings(std::numbers::pi, truth.fringe_min_times);
    }

    const double duration = model.duration;
    const double expected_tags =
        ((eta_s + eta_i) * truth.mean_pair_rate + truth.background_rate_signal + truth.background_rate_idler +
         2.0 * dark) * duration;
    const double p_any_bound = 1.0 - (1.0 - eta_s) * (1.0 - eta_i);
    const double candidates = p_any_bound * rate.bound() * duration;
    if (expected_tags > static_cast<double>(model.max_tags) || candidates > 4.0 * static_cast<double>(model.max_tags)) {
        throw ResourceLimitError("scan would produce ~" + std::to_string(static_cast<long long>(expected_tags)) +
                                 " tags, above the configured cap of " + std::to_string(model.max_tags));
    }

    // Only pairs that reach at least one detector are generated; which
    // detectors fire is then drawn conditionally on that.
    const double p_s_only = eta_s * (1.0 - eta_i);
    const double p_i_only = eta_i * (1.0 - eta_s);
    const double p_both = eta_s * eta_i;
    const double p_any = p_s_only + p_i_only + p_both;
    const auto detected_rate = [&](double t) { return p_any * rate(t); };
    const auto pairs = p_any > 0.0 ? thinned_poisson_times(detected_rate, duration, p_any * rate.bound(), seed)
                                   : std::vector<double>{};
    truth.pairs_detected = pairs.size();

    auto det_rng = make_engine(seed, detect_stream);
    auto jit_rng = make_engine(seed, jitter_stream);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> jitter(0.0, 1.0);
    const Picoseconds duration_ps = to_ps(duration);
    const auto quantize = [&](double t) -> Picoseconds {
        const double ps = std::round(t * kPicosecondsPerSecond);
        if (ps <= 0.0) return 0;
        return std::min(static_cast<Picoseconds>(ps), duration_ps);
    };
    const auto jittered = [&](double t) {
        return model.jitter_std > 0.0 ? t + model.jitter_std * jitter(jit_rng) : t;
    };

    auto& sig = result.signal.timestamps;
    auto& idl = result.idler.timestamps;
    sig.reserve(static_cast<std::size_t>(expected_tags / 2 * 1.1) + 16);
    idl.reserve(static_cast<std::size_t>(expected_tags / 2 * 1.1) + 16);
    for (const double t : pairs) {
        const double u = uni(det_rng) * p_any;
        const bool hit_s = u < p_s_only + p_both;
        const bool hit_i = u >= p_s_only;
        if (hit_s) sig.push_back(quantize(jittered(t)));
        if (hit_i) idl.push_back(quantize(jittered(t)));
        if (hit_s && hit_i) ++truth.pairs_both_detected;
    }

    const auto add_noise = [&](std::vector<Picoseconds>& tags, double background, std::uint64_t stream) {
        auto rng = make_engine(seed, stream);
        std::vector<double> times;
        homogeneous_poisson(background + dark, duration, rng, times);
        // iid jitter leaves a homogeneous Poisson process unchanged in law
        for (const double t : times) tags.push_back(quantize(t));
    };
    const std::size_t sig_pairs = sig.size();
    const std::size_t idl_pairs = idl.size();
    add_noise(sig, truth.background_rate_signal, signal_noise_stream);
    add_noise(idl, truth.background_rate_idler, idler_noise_stream);

    // Both parts are in time order up to jitter; sort each, then merge.
    const auto sort_parts = [](std::vector<Picoseconds>& tags, std::size_t split) {
        const auto mid = tags.begin() + static_cast<std::ptrdiff_t>(split);
        if (!std::is_sorted(tags.begin(), mid)) std::sort(tags.begin(), mid);
        if (!std::is_sorted(mid, tags.end())) std::sort(mid, tags.end());
        std::inplace_merge(tags.begin(), mid, tags.end());
    };
    sort_parts(sig, sig_pairs);
    sort_parts(idl, idl_pairs);
    const Picoseconds dead = to_ps(model.dead_time);
    apply_dead_time(sig, dead);
    apply_dead_time(idl, dead);

    const StreamMetadata meta{duration_ps, seed, model.scenario_id};
    result.signal.channel = Channel::signal;
    result.signal.metadata = meta;
    result.idler.channel = Channel::idler;
    result.idler.metadata = meta;
    return result;
}

}  // namespace pathid::tagsim
