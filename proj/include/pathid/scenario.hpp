#pragma once

// Scenario files: YAML documents whose scalars are SI quantities with unit
// suffixes ("180 nm/s"). The grammar is described in README.md. A scenario
// may start from a built-in preset (`base: paper_2m`) and override fields.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathid/beam_optics.hpp"
#include "pathid/coherence.hpp"
#include "pathid/fringe_analysis.hpp"
#include "pathid/rate_model.hpp"
#include "pathid/tagsim.hpp"
#include "pathid/turbulence.hpp"

namespace pathid::scenario {

struct PumpConfig {
    coherence::SourceSpectrum spectrum{405.5e-9, 160e6, coherence::Lineshape::lorentzian};
    double optics_wavelength = 405e-9;  // m, used for beam propagation
    double power = 15.40e-3;            // W
    double collimated_radius = 1.55e-3; // m, before the focusing lens
    double lens_focal_length = 0.300;   // m
    double lens_aperture = 25.4e-3;     // m
    double focal_parameter = 0.056;     // xi_p
};

struct SpdcConfig {
    double wavelength = 810e-9;          // m
    double crystal_length = 1e-3;        // m
    double waist = 13.6e-6;              // m, SPDC mode waist in the crystal
    double gain = 0.01;                  // g, per crystal
    double pair_rate = 2.4e5;            // pairs/s from one crystal at gain g
    double mode_overlap = 1.0;           // spatial/spectral indistinguishability
    double coherence_length = 220e-6;    // m, down-converted photons after filtering
};

struct LinkConfig {
    double mirror_focal_length = 0.500;  // m, concave mirrors on both stations
    double mirror_diameter = 75e-3;      // m
    double aperture_diameter = 25.4e-3;  // m, smallest element along the link
};

// Excess optical paths, see README "Path length convention".
struct PathConfig {
    double pump_path = 0.0;
    double dc_path_a = 0.0;
    double dc_path_b = 0.0;
};

struct ScanConfig {
    double duration = 70.0;          // s
    double stage_velocity = 180e-9;  // m/s
    double fold_factor = 2.0;
    double phase0 = 0.0;             // rad
};

struct TurbulenceConfig {
    std::optional<double> sigma_angle;           // rad; overrides the calibration
    turbulence::DistanceCalibration calibration;  // distance -> sigma_angle
    double angle_scale = 0.0;                    // rad; 0 = pump divergence at the second crystal
    double sigma_phase = 0.0;                    // rad
    double correlation_time = 0.1;               // s
    bool calibrated = false;                     // values fitted to reference data rather than measured
};

struct DetectorConfig {
    rates::DetectorParams params;
    double jitter = 100e-12;   // s
    double dead_time = 0.0;    // s
};

struct AnalysisConfig {
    std::size_t mc_samples = 100'000;
    analysis::ResampleMode mode = analysis::ResampleMode::paired;
};

// Published values a preset is compared against.
struct ReferenceValues {
    double vis_coincidences = 0.0;
    double vis_coincidences_std = 0.0;
    double vis_signal = 0.0;
    double vis_signal_std = 0.0;
    double vis_idler = 0.0;
    double vis_idler_std = 0.0;
    double shot_noise_coincidences = 0.0;
    double shot_noise_signal = 0.0;
    double shot_noise_idler = 0.0;
};

struct Scenario {
    std::string name = "custom";
    std::string base;  // preset the scenario was derived from, empty if none
    double distance = 0.0;  // m between the two crystals
    std::uint64_t seed = 1;

    PumpConfig pump;
    SpdcConfig spdc;
    LinkConfig link;
    PathConfig paths;
    ScanConfig scan;
    TurbulenceConfig turbulence;
    DetectorConfig detector;
    AnalysisConfig analysis;
    std::optional<ReferenceValues> reference;

    // Throws ValidationError with the offending field path.
    void validate() const;

    double pump_coherence_length() const;
    coherence::PathLayout path_layout() const;
    double vis_pump() const;
    // Focused pump in the first crystal, obtained from the collimated beam.
    optics::GaussianBeam focused_pump() const;
    double angle_scale() const;
    double sigma_angle() const;
    turbulence::TurbulenceModel turbulence_model() const;
};

std::vector<std::string> preset_names();
bool is_preset(std::string_view name);
Scenario preset(std::string_view name);

// `source` is either a path to a scenario file or a preset name. Parse
// failures throw ParseError, invariant violations throw ValidationError.
Scenario load_scenario(std::string_view source);
Scenario load_scenario_file(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view yaml_text, std::string_view origin = "<string>");

tagsim::ScanModel to_scan_model(const Scenario& scenario);

nlohmann::ordered_json to_json(const Scenario& scenario);

}  // namespace pathid::scenario
