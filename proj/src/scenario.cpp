#include "pathid/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "pathid/error.hpp"
#include "pathid/units.hpp"

namespace pathid::scenario {

namespace {

// Built-in presets. Optics, source and scan parameters are the published
// ones; detection efficiencies, background fractions, mode overlaps and
// turbulence values are inferred from the published count levels and
// visibilities.
constexpr std::string_view kCommonPreset = R"(
pump:
  center_wavelength: 405.5 nm
  optics_wavelength: 405 nm
  linewidth: 160 MHz
  lineshape: lorentzian
  power: 15.40 mW
  collimated_radius: 1.55 mm
  lens_focal_length: 300 mm
  lens_aperture: 25.4 mm
  focal_parameter: 0.056
spdc:
  wavelength: 810 nm
  crystal_length: 1 mm
  waist: 13.6 um
  gain: 0.01
  pair_rate: 2.4e5 cps
  coherence_length: 220 um
link:
  mirror_focal_length: 500 mm
  mirror_diameter: 75 mm
  aperture_diameter: 25.4 mm
paths:
  pump_path: 0 m
  dc_path_a: 0 m
  dc_path_b: 0 m
scan:
  duration: 70 s
  stage_velocity: 180 nm/s
  fold_factor: 2
  phase0: 0 rad
turbulence:
  calibrated: true
  correlation_time: 2 s
  calibration:
    - {distance: 2 m, sigma_angle: 0.5 mrad}
    - {distance: 20 m, sigma_angle: 2 mrad}
    - {distance: 70 m, sigma_angle: 4 mrad}
detector:
  dark_rate: 200 cps
  coincidence_window: 1.5 ns
  integration_time: 70 ms
  jitter: 100 ps
  dead_time: 0 s
analysis:
  mc_samples: 100000
  mode: paired
)";

struct PresetDef {
    std::string_view name;
    std::string_view body;
};

constexpr PresetDef kPresets[] = {
    {"paper_2m", R"(
name: paper_2m
distance: 2 m
spdc:
  mode_overlap: 0.975
turbulence:
  sigma_phase: 0.05 rad
detector:
  efficiency_signal: 3.79 %
  efficiency_idler: 3.79 %
  singles_background_fraction: 0.80
reference:
  vis_coincidences: 96.15 %
  vis_coincidences_std: 2.86 %
  vis_signal: 18.79 %
  vis_signal_std: 2.70 %
  vis_idler: 19.90 %
  vis_idler_std: 2.61 %
  shot_noise_coincidences: 2.70 %
  shot_noise_signal: 2.03 %
  shot_noise_idler: 1.88 %
)"},
    {"paper_20m", R"(
name: paper_20m
distance: 20 m
spdc:
  mode_overlap: 0.90
turbulence:
  sigma_phase: 0.1 rad
detector:
  efficiency_signal: 2.99 %
  efficiency_idler: 2.99 %
  singles_background_fraction: 0.66
reference:
  vis_coincidences: 92.05 %
  vis_coincidences_std: 5.65 %
  vis_signal: 35.62 %
  vis_signal_std: 7.08 %
  vis_idler: 26.16 %
  vis_idler_std: 7.32 %
  shot_noise_coincidences: 4.97 %
  shot_noise_signal: 1.99 %
  shot_noise_idler: 1.97 %
)"},
    {"paper_70m", R"(
name: paper_70m
distance: 70 m
spdc:
  mode_overlap: 0.60
turbulence:
  sigma_phase: 0.15 rad
detector:
  efficiency_signal: 1.47 %
  efficiency_idler: 1.47 %
  singles_background_fraction: 0.865
reference:
  vis_coincidences: 83.90 %
  vis_coincidences_std: 12.98 %
  vis_signal: 10.86 %
  vis_signal_std: 3.44 %
  vis_idler: 8.42 %
  vis_idler_std: 5.20 %
  shot_noise_coincidences: 14.20 %
  shot_noise_signal: 3.17 %
  shot_noise_idler: 2.41 %
)"},
};

const PresetDef* find_preset(std::string_view name) {
    for (const auto& p : kPresets) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::string join(const std::string& prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

YAML::Node load_yaml(std::string_view text, std::string_view origin) {
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ParseError(std::string(origin) + ": " + e.what());
    }
}

// Applies the keys of one YAML mapping onto a Scenario, tracking field paths.
class Reader {
public:
    explicit Reader(Scenario& s) : s_(s) {}

    void apply(const YAML::Node& root) {
        if (!root || root.IsNull()) return;
        if (!root.IsMap()) throw ParseError("scenario document must be a mapping");
        for (const auto& kv : root) {
            const auto key = kv.first.as<std::string>();
            const YAML::Node& v = kv.second;
            if (key == "base") {
                continue;  // handled by the caller
            } else if (key == "name") {
                s_.name = scalar(v, key);
            } else if (key == "distance") {
                s_.distance = quantity(v, key, units::kLength);
            } else if (key == "seed") {
                s_.seed = unsigned_int(v, key);
            } else if (key == "pump") {
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& p = s_.pump;
                    if (k == "center_wavelength") p.spectrum.center_wavelength = quantity(n, path, units::kLength);
                    else if (k == "optics_wavelength") p.optics_wavelength = quantity(n, path, units::kLength);
                    else if (k == "linewidth") p.spectrum.fwhm_bandwidth = quantity(n, path, units::kFrequency);
                    else if (k == "lineshape") p.spectrum.lineshape = lineshape(n, path);
                    else if (k == "power") p.power = quantity(n, path, units::kPower);
                    else if (k == "collimated_radius") p.collimated_radius = quantity(n, path, units::kLength);
                    else if (k == "lens_focal_length") p.lens_focal_length = quantity(n, path, units::kLength);
                    else if (k == "lens_aperture") p.lens_aperture = quantity(n, path, units::kLength);
                    else if (k == "focal_parameter") p.focal_parameter = number(n, path);
                    else return false;
                    return true;
                });
            } else if (key == "spdc") {
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& p = s_.spdc;
                    if (k == "wavelength") p.wavelength = quantity(n, path, units::kLength);
                    else if (k == "crystal_length") p.crystal_length = quantity(n, path, units::kLength);
                    else if (k == "waist") p.waist = quantity(n, path, units::kLength);
                    else if (k == "gain") p.gain = number(n, path);
                    else if (k == "pair_rate") p.pair_rate = quantity(n, path, units::kFrequency);
                    else if (k == "mode_overlap") p.mode_overlap = number(n, path);
                    else if (k == "coherence_length") p.coherence_length = quantity(n, path, units::kLength);
                    else return false;
                    return true;
                });
            } else if (key == "link") {
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& p = s_.link;
                    if (k == "mirror_focal_length") p.mirror_focal_length = quantity(n, path, units::kLength);
                    else if (k == "mirror_diameter") p.mirror_diameter = quantity(n, path, units::kLength);
                    else if (k == "aperture_diameter") p.aperture_diameter = quantity(n, path, units::kLength);
                    else return false;
                    return true;
                });
            } else if (key == "paths") {
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& p = s_.paths;
                    if (k == "pump_path") p.pump_path = quantity(n, path, units::kLength);
                    else if (k == "dc_path_a") p.dc_path_a = quantity(n, path, units::kLength);
                    else if (k == "dc_path_b") p.dc_path_b = quantity(n, path, units::kLength);
                    else return false;
                    return true;
                });
            } else if (key == "scan") {
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& p = s_.scan;
                    if (k == "duration") p.duration = quantity(n, path, units::kTime);
                    else if (k == "stage_velocity") p.stage_velocity = quantity(n, path, units::kVelocity);
                    else if (k == "fold_factor") p.fold_factor = number(n, path);
                    else if (k == "phase0") p.phase0 = quantity(n, path, units::kAngle);
                    else return false;
                    return true;
                });
            } else if (key == "turbulence") {
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& p = s_.turbulence;
                    if (k == "sigma_angle") p.sigma_angle = quantity(n, path, units::kAngle);
                    else if (k == "calibration") p.calibration = calibration(n, path);
                    else if (k == "angle_scale") p.angle_scale = quantity(n, path, units::kAngle);
                    else if (k == "sigma_phase") p.sigma_phase = quantity(n, path, units::kAngle);
                    else if (k == "correlation_time") p.correlation_time = quantity(n, path, units::kTime);
                    else if (k == "calibrated") p.calibrated = boolean(n, path);
                    else return false;
                    return true;
                });
            } else if (key == "detector") {
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& d = s_.detector;
                    auto& p = d.params;
                    if (k == "efficiency_signal") p.efficiency_s = number(n, path);
                    else if (k == "efficiency_idler") p.efficiency_i = number(n, path);
                    else if (k == "dark_rate") p.dark_rate = quantity(n, path, units::kFrequency);
                    else if (k == "coincidence_window") p.coincidence_window = quantity(n, path, units::kTime);
                    else if (k == "integration_time") p.integration_time = quantity(n, path, units::kTime);
                    else if (k == "singles_background_fraction") p.singles_background_fraction = number(n, path);
                    else if (k == "jitter") d.jitter = quantity(n, path, units::kTime);
                    else if (k == "dead_time") d.dead_time = quantity(n, path, units::kTime);
                    else return false;
                    return true;
                });
            } else if (key == "analysis") {
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& a = s_.analysis;
                    if (k == "mc_samples") a.mc_samples = unsigned_int(n, path);
                    else if (k == "mode") a.mode = resample_mode(n, path);
                    else return false;
                    return true;
                });
            } else if (key == "reference") {
                if (!s_.reference) s_.reference.emplace();
                section(v, key, [&](const std::string& k, const YAML::Node& n, const std::string& path) {
                    auto& r = *s_.reference;
                    double* field = nullptr;
                    if (k == "vis_coincidences") field = &r.vis_coincidences;
                    else if (k == "vis_coincidences_std") field = &r.vis_coincidences_std;
                    else if (k == "vis_signal") field = &r.vis_signal;
                    else if (k == "vis_signal_std") field = &r.vis_signal_std;
                    else if (k == "vis_idler") field = &r.vis_idler;
                    else if (k == "vis_idler_std") field = &r.vis_idler_std;
                    else if (k == "shot_noise_coincidences") field = &r.shot_noise_coincidences;
                    else if (k == "shot_noise_signal") field = &r.shot_noise_signal;
                    else if (k == "shot_noise_idler") field = &r.shot_noise_idler;
                    else return false;
                    *field = number(n, path);
                    return true;
                });
            } else {
                throw ValidationError(key, "unknown field");
            }
            seen_.insert(key);
        }
    }

    const std::set<std::string>& seen() const { return seen_; }

private:
    using Handler = std::function<bool(const std::string&, const YAML::Node&, const std::string&)>;

    void section(const YAML::Node& node, const std::string& prefix, const Handler& handler) {
        if (node.IsNull()) return;
        if (!node.IsMap()) throw ParseError(prefix + ": expected a mapping");
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            const auto path = join(prefix, key);
            if (!handler(key, kv.second, path)) throw ValidationError(path, "unknown field");
            seen_.insert(path);
        }
    }

    static std::string scalar(const YAML::Node& n, const std::string& path) {
        if (!n.IsScalar()) throw ParseError(path + ": expected a scalar");
        return n.Scalar();
    }

    static double quantity(const YAML::Node& n, const std::string& path, units::Dimension dim) {
        return units::parse_as(scalar(n, path), dim, path);
    }

    static double number(const YAML::Node& n, const std::string& path) {
        return units::parse_as(scalar(n, path), units::kDimensionless, path);
    }

    static std::uint64_t unsigned_int(const YAML::Node& n, const std::string& path) {
        const auto text = scalar(n, path);
        try {
            std::size_t used = 0;
            if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
            const auto v = std::stoull(text, &used);
            if (used != text.size()) {
                // allow "1e5" style counts
                const double d = number(n, path);
                if (d < 0.0 || d != std::floor(d)) throw std::invalid_argument("not an integer");
                return static_cast<std::uint64_t>(d);
            }
            return v;
        } catch (const std::logic_error&) {
            throw ParseError(path + ": expected a non-negative integer, got '" + text + "'");
        }
    }

    static bool boolean(const YAML::Node& n, const std::string& path) {
        try {
            return n.as<bool>();
        } catch (const YAML::Exception&) {
            throw ParseError(path + ": expected true or false");
        }
    }

    static coherence::Lineshape lineshape(const YAML::Node& n, const std::string& path) {
        try {
            return coherence::parse_lineshape(scalar(n, path));
        } catch (const ParseError& e) {
            throw ParseError(path + ": " + e.what());
        }
    }

    static analysis::ResampleMode resample_mode(const YAML::Node& n, const std::string& path) {
        const auto text = scalar(n, path);
        if (text == "paired") return analysis::ResampleMode::paired;
        if (text == "pooled") return analysis::ResampleMode::pooled;
        throw ParseError(path + ": expected paired or pooled, got '" + text + "'");
    }

    static turbulence::DistanceCalibration calibration(const YAML::Node& n, const std::string& path) {
        if (!n.IsSequence()) throw ParseError(path + ": expected a list of {distance, sigma_angle}");
        std::vector<std::pair<double, double>> anchors;
        for (std::size_t i = 0; i < n.size(); ++i) {
            const auto item_path = path + "[" + std::to_string(i) + "]";
            const YAML::Node item = n[i];
            if (!item.IsMap() || !item["distance"] || !item["sigma_angle"] || item.size() != 2) {
                throw ParseError(item_path + ": expected {distance, sigma_angle}");
            }
            const double d = quantity(item["distance"], item_path + ".distance", units::kLength);
            const double sigma = quantity(item["sigma_angle"], item_path + ".sigma_angle", units::kAngle);
            if (!(d >= 0.0)) throw ValidationError(item_path + ".distance", "must be >= 0");
            if (!(sigma >= 0.0)) throw ValidationError(item_path + ".sigma_angle", "must be >= 0");
            anchors.emplace_back(d, sigma);
        }
        return turbulence::DistanceCalibration(std::move(anchors));
    }

    Scenario& s_;
    std::set<std::string> seen_;
};

// Fields a scenario without `base:` has to state explicitly.
constexpr std::string_view kRequired[] = {
    "distance",          "pump.center_wavelength",      "pump.linewidth",
    "spdc.gain",         "spdc.pair_rate",              "detector.efficiency_signal",
    "detector.efficiency_idler",
};

bool unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void Scenario::validate() const {
    if (name.empty()) throw ValidationError("name", "must not be empty");
    if (!(distance >= 0.0) || !std::isfinite(distance)) throw ValidationError("distance", "must be >= 0");

    if (!(pump.spectrum.center_wavelength > 0.0)) throw ValidationError("pump.center_wavelength", "must be > 0");
    if (!(pump.spectrum.fwhm_bandwidth > 0.0)) throw ValidationError("pump.linewidth", "must be > 0");
    if (!(pump.optics_wavelength > 0.0)) throw ValidationError("pump.optics_wavelength", "must be > 0");
    if (!(pump.power >= 0.0)) throw ValidationError("pump.power", "must be >= 0");
    if (!(pump.collimated_radius > 0.0)) throw ValidationError("pump.collimated_radius", "must be > 0");
    if (!(pump.lens_focal_length > 0.0)) throw ValidationError("pump.lens_focal_length", "must be > 0");
    if (!(pump.lens_aperture > 0.0)) throw ValidationError("pump.lens_aperture", "must be > 0");
    if (!(pump.focal_parameter > 0.0)) throw ValidationError("pump.focal_parameter", "must be > 0");

    if (!(spdc.wavelength > 0.0)) throw ValidationError("spdc.wavelength", "must be > 0");
    if (!(spdc.crystal_length > 0.0)) throw ValidationError("spdc.crystal_length", "must be > 0");
    if (!(spdc.waist > 0.0)) throw ValidationError("spdc.waist", "must be > 0");
    if (!(spdc.gain >= 0.0)) throw ValidationError("spdc.gain", "must be >= 0");
    if (!(spdc.pair_rate >= 0.0)) throw ValidationError("spdc.pair_rate", "must be >= 0");
    if (!unit_interval(spdc.mode_overlap)) throw ValidationError("spdc.mode_overlap", "must be in [0, 1]");
    if (!(spdc.coherence_length > 0.0)) throw ValidationError("spdc.coherence_length", "must be > 0");

    if (!(link.mirror_focal_length > 0.0)) throw ValidationError("link.mirror_focal_length", "must be > 0");
    if (!(link.mirror_diameter > 0.0)) throw ValidationError("link.mirror_diameter", "must be > 0");
    if (!(link.aperture_diameter > 0.0)) throw ValidationError("link.aperture_diameter", "must be > 0");

    if (!(paths.pump_path >= 0.0)) throw ValidationError("paths.pump_path", "must be >= 0");
    if (!(paths.dc_path_a >= 0.0)) throw ValidationError("paths.dc_path_a", "must be >= 0");
    if (!(paths.dc_path_b >= 0.0)) throw ValidationError("paths.dc_path_b", "must be >= 0");

    if (!(turbulence.angle_scale >= 0.0)) throw ValidationError("turbulence.angle_scale", "must be >= 0");
    if (turbulence.sigma_angle && !(*turbulence.sigma_angle >= 0.0)) {
        throw ValidationError("turbulence.sigma_angle", "must be >= 0");
    }
    if (analysis.mc_samples < 10'000) throw ValidationError("analysis.mc_samples", "must be >= 10000");

    const auto model = to_scan_model(*this);
    model.validate();
    const double fringe_period_s = pump.spectrum.center_wavelength / (scan.fold_factor * scan.stage_velocity);
    if (scan.stage_velocity > 0.0 && scan.duration < 3.0 * fringe_period_s) {
        throw ValidationError("scan.duration", "shorter than three fringe periods");
    }
    if (scan.stage_velocity > 0.0 && fringe_period_s < 4.0 * detector.params.integration_time) {
        throw ValidationError("detector.integration_time", "fringe period spans fewer than four bins");
    }
}

double Scenario::pump_coherence_length() const {
    return coherence::coherence_length(coherence::coherence_time(pump.spectrum));
}

coherence::PathLayout Scenario::path_layout() const {
    return {paths.pump_path, paths.dc_path_a, paths.dc_path_b, pump_coherence_length(), spdc.coherence_length};
}

double Scenario::vis_pump() const {
    const auto layout = path_layout();
    if (!coherence::dc_condition(layout).satisfied) return 0.0;
    const double mismatch = std::abs(layout.pump_path - layout.dc_path_a - layout.dc_path_b);
    return coherence::pump_coherence_factor(mismatch, layout.pump_coh_len, pump.spectrum.lineshape);
}

optics::GaussianBeam Scenario::focused_pump() const {
    const optics::GaussianBeam collimated{pump.optics_wavelength, pump.collimated_radius, 0.0};
    return optics::conjugate_waist(collimated, {pump.lens_focal_length, pump.lens_aperture});
}

double Scenario::angle_scale() const {
    if (turbulence.angle_scale > 0.0) return turbulence.angle_scale;
    return optics::divergence_half_angle(focused_pump());
}

double Scenario::sigma_angle() const {
    if (turbulence.sigma_angle) return *turbulence.sigma_angle;
    if (turbulence.calibration.empty()) return 0.0;
    return turbulence::sigma_from_distance(distance, turbulence.calibration);
}

turbulence::TurbulenceModel Scenario::turbulence_model() const {
    return {sigma_angle(), angle_scale(), turbulence.sigma_phase, turbulence.correlation_time, distance};
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
}

bool is_preset(std::string_view name) { return find_preset(name) != nullptr; }

Scenario preset(std::string_view name) {
    const PresetDef* def = find_preset(name);
    if (!def) throw ValidationError("base", "unknown preset '" + std::string(name) + "'");
    Scenario s;
    Reader reader(s);
    reader.apply(load_yaml(kCommonPreset, "preset"));
    reader.apply(load_yaml(def->body, def->name));
    s.base = std::string(def->name);
    return s;
}

Scenario parse_scenario(std::string_view yaml_text, std::string_view origin) {
    const YAML::Node root = load_yaml(yaml_text, origin);
    if (root && !root.IsNull() && !root.IsMap()) {
        throw ParseError(std::string(origin) + ": scenario document must be a mapping");
    }
    Scenario s;
    std::string base;
    if (root && root.IsMap() && root["base"]) {
        if (!root["base"].IsScalar()) throw ParseError("base: expected a preset name");
        base = root["base"].Scalar();
        s = preset(base);
        s.name = base + "_custom";
    }
    Reader reader(s);
    reader.apply(root);
    if (base.empty()) {
        for (const auto field : kRequired) {
            if (!reader.seen().contains(std::string(field))) {
                throw ValidationError(std::string(field), "required field is missing");
            }
        }
    } else if (s.reference && s.distance != preset(base).distance) {
        // published numbers only apply at the preset's own distance
        s.reference.reset();
    }
    s.validate();
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.string());
}

Scenario load_scenario(std::string_view source) {
    const std::filesystem::path path{std::string(source)};
    if (std::filesystem::exists(path)) return load_scenario_file(path);
    if (is_preset(source)) {
        Scenario s = preset(source);
        s.validate();
        return s;
    }
    throw ParseError("'" + std::string(source) + "' is neither a scenario file nor a preset (" +
                     [] {
                         std::string names;
                         for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
                         return names;
                     }() +
                     ")");
}

tagsim::ScanModel to_scan_model(const Scenario& s) {
    tagsim::ScanModel m;
    m.scenario_id = s.name;
    m.duration = s.scan.duration;
    m.pump_wavelength = s.pump.spectrum.center_wavelength;
    m.stage_velocity = s.scan.stage_velocity;
    m.fold_factor = s.scan.fold_factor;
    m.phase0 = s.scan.phase0;
    m.base_gain = s.spdc.gain;
    m.pair_rate_single = s.spdc.pair_rate;
    m.mode_overlap = s.spdc.mode_overlap;
    m.vis_pump = s.vis_pump();
    m.turbulence = s.turbulence_model();
    m.detector = s.detector.params;
    m.jitter_std = s.detector.jitter;
    m.dead_time = s.detector.dead_time;
    return m;
}

nlohmann::ordered_json to_json(const Scenario& s) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["name"] = s.name;
    j["base"] = s.base;
    j["distance_m"] = s.distance;
    j["seed"] = s.seed;
    j["pump"] = {
        {"center_wavelength_m", s.pump.spectrum.center_wavelength},
        {"optics_wavelength_m", s.pump.optics_wavelength},
        {"linewidth_hz", s.pump.spectrum.fwhm_bandwidth},
        {"lineshape", std::string(coherence::to_string(s.pump.spectrum.lineshape))},
        {"power_w", s.pump.power},
        {"collimated_radius_m", s.pump.collimated_radius},
        {"lens_focal_length_m", s.pump.lens_focal_length},
        {"lens_aperture_m", s.pump.lens_aperture},
        {"focal_parameter", s.pump.focal_parameter},
    };
    j["spdc"] = {
        {"wavelength_m", s.spdc.wavelength},
        {"crystal_length_m", s.spdc.crystal_length},
        {"waist_m", s.spdc.waist},
        {"gain", s.spdc.gain},
        {"pair_rate_cps", s.spdc.pair_rate},
        {"mode_overlap", s.spdc.mode_overlap},
        {"coherence_length_m", s.spdc.coherence_length},
    };
    j["link"] = {
        {"mirror_focal_length_m", s.link.mirror_focal_length},
        {"mirror_diameter_m", s.link.mirror_diameter},
        {"aperture_diameter_m", s.link.aperture_diameter},
    };
    j["paths"] = {
        {"pump_path_m", s.paths.pump_path},
        {"dc_path_a_m", s.paths.dc_path_a},
        {"dc_path_b_m", s.paths.dc_path_b},
    };
    j["scan"] = {
        {"duration_s", s.scan.duration},
        {"stage_velocity_m_s", s.scan.stage_velocity},
        {"fold_factor", s.scan.fold_factor},
        {"phase0_rad", s.scan.phase0},
    };
    ordered_json anchors = ordered_json::array();
    for (const auto& [d, sigma] : s.turbulence.calibration.anchors()) {
        anchors.push_back({{"distance_m", d}, {"sigma_angle_rad", sigma}});
    }
    j["turbulence"] = {
        {"sigma_angle_rad", s.sigma_angle()},
        {"sigma_angle_source", s.turbulence.sigma_angle ? "explicit" : (anchors.empty() ? "none" : "calibration")},
        {"angle_scale_rad", s.angle_scale()},
        {"sigma_phase_rad", s.turbulence.sigma_phase},
        {"correlation_time_s", s.turbulence.correlation_time},
        {"calibration", anchors},
        {"calibrated", s.turbulence.calibrated},
    };
    const auto& d = s.detector.params;
    j["detector"] = {
        {"efficiency_signal", d.efficiency_s},
        {"efficiency_idler", d.efficiency_i},
        {"dark_rate_cps", d.dark_rate},
        {"coincidence_window_s", d.coincidence_window},
        {"integration_time_s", d.integration_time},
        {"singles_background_fraction", d.singles_background_fraction},
        {"jitter_s", s.detector.jitter},
        {"dead_time_s", s.detector.dead_time},
    };
    j["analysis"] = {
        {"mc_samples", s.analysis.mc_samples},
        {"mode", s.analysis.mode == analysis::ResampleMode::paired ? "paired" : "pooled"},
    };
    if (s.reference) {
        const auto& r = *s.reference;
        j["reference"] = {
            {"vis_coincidences", r.vis_coincidences},
            {"vis_coincidences_std", r.vis_coincidences_std},
            {"vis_signal", r.vis_signal},
            {"vis_signal_std", r.vis_signal_std},
            {"vis_idler", r.vis_idler},
            {"vis_idler_std", r.vis_idler_std},
            {"shot_noise_coincidences", r.shot_noise_coincidences},
            {"shot_noise_signal", r.shot_noise_signal},
            {"shot_noise_idler", r.shot_noise_idler},
        };
    }
    if (!s.base.empty()) {
        j["inferred_fields"] = {"spdc.pair_rate", "spdc.mode_overlap", "spdc.coherence_length",
                                "detector.efficiency_signal", "detector.efficiency_idler",
                                "detector.singles_background_fraction", "turbulence"};
    }
    return j;
}

}  // namespace pathid::scenario
