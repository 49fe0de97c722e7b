#pragma once

// Synthetic two-channel time-tag streams for a trombone phase scan.
//
// Pair emission is an inhomogeneous Poisson process whose rate is the
// two-crystal fringe
//     R(t) = R1 / g^2 * [g1^2 + g2(t)^2] * [1 + V_p V_c(t) cos(phase(t))],
//     V_c(t) = overlap * 2 g1 g2(t) / (g1^2 + g2(t)^2),
//     phase(t) = k_p fold v_m t + phase0 + dPhi(t),
// where R1 is the single-crystal pair rate at base gain g and g2(t), dPhi(t)
// come from the turbulence model on the integration-bin grid. Each pair is
// detected independently on each channel (only pairs reaching at least one
// detector are generated); non-pair background singles, dark
// counts and Gaussian timing jitter are added, and timestamps are quantized to
// 1 ps.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pathid/rate_model.hpp"
#include "pathid/time_tags.hpp"
#include "pathid/turbulence.hpp"

namespace pathid::tagsim {

struct ScanModel {
    std::string scenario_id = "custom";
    double duration = 70.0;              // s
    double pump_wavelength = 405.5e-9;   // m, sets the fringe period
    double stage_velocity = 180e-9;      // m/s
    double fold_factor = 2.0;
    double phase0 = 0.0;                 // rad

    double base_gain = 0.01;             // g1 and nominal g2
    double pair_rate_single = 1e4;       // pairs/s from one crystal at base gain
    double mode_overlap = 1.0;           // indistinguishability factor inside V_c
    double vis_pump = 1.0;               // V_p

    turbulence::TurbulenceModel turbulence;
    rates::DetectorParams detector;

    double jitter_std = 100e-12;         // s per detection
    double dead_time = 0.0;              // s, 0 disables
    std::size_t max_tags = 50'000'000;

    void validate() const;
    double k_pump() const;
    std::size_t n_bins() const;
};

// Per-bin ground truth on the integration grid.
struct ScanGroundTruth {
    double bin_duration = 0.0;
    std::vector<double> pair_rate;          // bin-averaged pair emission rate, 1/s
    std::vector<double> phase;              // at bin centre, rad
    std::vector<double> gain;               // g2 per bin
    std::vector<double> expected_coincidences;  // per bin, from detected pairs only
    std::vector<double> expected_signal;        // singles per bin incl. background and dark
    std::vector<double> expected_idler;
    double mean_pair_rate = 0.0;
    double background_rate_signal = 0.0;
    double background_rate_idler = 0.0;
    std::uint64_t pairs_detected = 0;  // pairs seen by at least one detector
    std::uint64_t pairs_both_detected = 0;
    // Number of fringe maxima (phase = 2 pi k) inside the scan and their times.
    std::vector<double> fringe_max_times;
    std::vector<double> fringe_min_times;
};

struct ScanResult {
    TimeTagStream signal;
    TimeTagStream idler;
    ScanGroundTruth truth;
};

// Rate function and its bound for the thinning sampler.
std::vector<double> thinned_poisson_times(const std::function<double(double)>& rate_fn, double duration,
                                          double rate_max, std::uint64_t seed);

// Pair-rate visibility of the model without turbulence: V_p * overlap.
double model_pair_visibility(const ScanModel& model);

ScanResult simulate_scan(const ScanModel& model, std::uint64_t seed);

}  // namespace pathid::tagsim
