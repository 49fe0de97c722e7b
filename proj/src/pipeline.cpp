#include "pathid/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "pathid/beam_optics.hpp"
#include "pathid/coherence.hpp"
#include "pathid/error.hpp"
#include "pathid/tag_io.hpp"

namespace pathid::pipeline {

namespace {

constexpr std::string_view kCoincidences = "coincidences";
constexpr std::string_view kSignal = "signal";
constexpr std::string_view kIdler = "idler";

// Stream ids for seeds derived from a run seed.
constexpr std::uint64_t kAnalysisSeedSalt = 0x9e3779b97f4a7c15ULL;

std::uint64_t analysis_seed(std::uint64_t run_seed, std::string_view kind) {
    std::uint64_t h = run_seed ^ kAnalysisSeedSalt;
    for (const char c : kind) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
    return h;
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (const double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

// JSON numbers: non-finite values become null.
Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

void annotate(FringeTrace& trace, const scenario::Scenario& s) {
    trace.stage_velocity = s.scan.stage_velocity;
    trace.fold_factor = s.scan.fold_factor;
    trace.pump_wavelength = s.pump.spectrum.center_wavelength;
    trace.distance = s.distance;
    trace.extra["scenario"] = s.name;
}

Json estimate_json(const ChannelReport& c) {
    const auto& a = c.analysis;
    Json j;
    j["kind"] = a.kind;
    j["n_bins"] = c.n_bins;
    j["mean_counts_per_bin"] = c.mean_counts;
    j["period_bins"] = a.period_bins;
    j["degenerate"] = a.degenerate;
    if (a.degenerate) j["degenerate_reason"] = a.degenerate_reason;
    j["n_maxima"] = a.extrema.maxima.size();
    j["n_minima"] = a.extrema.minima.size();
    j["max_mean"] = a.extrema.max_mean();
    j["min_mean"] = a.extrema.min_mean();
    j["extrema"] = {
        {"max_index", a.extrema.max_index},
        {"maxima", a.extrema.maxima},
        {"min_index", a.extrema.min_index},
        {"minima", a.extrema.minima},
    };
    if (!a.degenerate) {
        j["visibility"] = {
            {"mean", num(a.estimate.mean)},
            {"std", num(a.estimate.std)},
            {"point", num(a.estimate.point)},
            {"out_of_range", a.estimate.out_of_range},
            {"degenerate_draws", a.estimate.degenerate_draws},
        };
        j["shot_noise_error"] = num(a.shot_noise_error);
    }
    j["fit"] = {
        {"offset", num(a.fit.offset)},       {"amplitude", num(a.fit.amplitude)},
        {"period_bins", num(a.fit.period)},  {"phase_rad", num(a.fit.phase)},
        {"visibility", num(a.fit.visibility())}, {"rms_residual", num(a.fit.residual)},
        {"iterations", a.fit.iterations},    {"converged", a.fit.converged},
    };
    return j;
}

std::string histogram_csv(const analysis::Histogram& h) {
    std::string out = "bin_lo,bin_hi,count\n";
    const std::size_t n = h.counts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = h.lo + (h.hi - h.lo) * static_cast<double>(i) / static_cast<double>(n);
        const double hi = h.lo + (h.hi - h.lo) * static_cast<double>(i + 1) / static_cast<double>(n);
        out += fmt::format("{:.6f},{:.6f},{}\n", lo, hi, h.counts[i]);
    }
    return out;
}

}  // namespace

// ---- audit ---------------------------------------------------------------

bool AuditRow::within(double tolerance) const {
    if (!reference) return true;
    return std::abs(value / *reference - 1.0) <= tolerance;
}

const AuditRow& AuditReport::row(std::string_view key) const {
    for (const auto& r : rows) {
        if (r.key == key) return r;
    }
    throw std::out_of_range("audit has no row '" + std::string(key) + "'");
}

bool AuditReport::golden_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const AuditRow& r) { return !r.golden || r.within(0.01); });
}

AuditReport run_audit(const scenario::Scenario& s) {
    using optics::GaussianBeam;
    AuditReport rep;
    rep.scenario = s.name;
    rep.distance = s.distance;
    const bool is_preset = !s.base.empty();
    const auto ref = [&](double v) { return is_preset ? std::optional<double>(v) : std::nullopt; };
    const auto add = [&](std::string key, std::string label, double value, std::string unit,
                         std::optional<double> reference = std::nullopt, bool golden = false) {
        rep.rows.push_back({std::move(key), std::move(label), value, std::move(unit), reference,
                            golden && reference.has_value()});
    };

    // pump: collimated -> focused into crystal I -> recollimated by the sending mirror
    const GaussianBeam focused = s.focused_pump();
    const double zr_focus = optics::rayleigh_length(focused);
    const optics::FocusingElement mirror{s.link.mirror_focal_length, s.link.mirror_diameter};
    const GaussianBeam pump_link = optics::conjugate_waist(focused, mirror);
    const double zr_pump_link = optics::rayleigh_length(pump_link);

    const double xi_s = optics::matched_spdc_focal_parameter(s.pump.focal_parameter);
    const GaussianBeam spdc_focus{s.spdc.wavelength, s.spdc.waist, 0.0};
    const GaussianBeam spdc_link = optics::conjugate_waist(spdc_focus, mirror);
    const double zr_spdc_link = optics::rayleigh_length(spdc_link);

    // the link waist sits at the sending mirror, the second crystal `distance` away
    const double w_pump_d = optics::beam_radius_at({pump_link.wavelength, pump_link.waist_radius, 0.0}, s.distance);
    const double w_spdc_d = optics::beam_radius_at({spdc_link.wavelength, spdc_link.waist_radius, 0.0}, s.distance);
    const double w_pump_70 = optics::beam_radius_at({pump_link.wavelength, pump_link.waist_radius, 0.0}, 70.0);
    const double w_spdc_70 = optics::beam_radius_at({spdc_link.wavelength, spdc_link.waist_radius, 0.0}, 70.0);
    const auto ap_pump =
        optics::aperture_check({pump_link.wavelength, pump_link.waist_radius, 0.0}, s.distance, s.link.aperture_diameter);
    const auto ap_spdc =
        optics::aperture_check({spdc_link.wavelength, spdc_link.waist_radius, 0.0}, s.distance, s.link.aperture_diameter);
    rep.pump_aperture_pass = ap_pump.pass;
    rep.spdc_aperture_pass = ap_spdc.pass;

    add("pump_focused_waist", "pump waist in crystal I", focused.waist_radius * 1e6, "um", ref(25.0), true);
    add("pump_focused_rayleigh", "pump Rayleigh length in crystal I", zr_focus * 1e3, "mm", ref(4.85), true);
    add("pump_crystal_ratio", "crystal length / pump confocal length", s.spdc.crystal_length / (2.0 * zr_focus), "");
    add("pump_focal_parameter", "pump focal parameter xi_p", s.pump.focal_parameter, "", ref(0.056));
    add("spdc_focal_parameter", "matched SPDC focal parameter xi_s", xi_s, "", ref(0.40), true);
    add("spdc_waist", "SPDC waist in crystal", s.spdc.waist * 1e6, "um", ref(13.6));
    add("pump_peak_intensity", "pump peak intensity at focus", optics::peak_intensity(s.pump.power, focused.waist_radius),
        "W/cm^2", ref(7740.88));
    add("pump_collimated_radius", "pump collimated radius", pump_link.waist_radius * 1e3, "mm", ref(2.58), true);
    add("spdc_collimated_radius", "SPDC collimated radius", spdc_link.waist_radius * 1e3, "mm", ref(9.48), true);
    add("pump_link_rayleigh", "pump link Rayleigh length", zr_pump_link, "m", ref(51.6), true);
    add("spdc_link_rayleigh", "SPDC link Rayleigh length", zr_spdc_link, "m", ref(348.6), true);
    add("pump_radius_70m", "pump radius at 70 m", w_pump_70 * 1e3, "mm", ref(4.35), true);
    add("spdc_radius_70m", "SPDC radius at 70 m", w_spdc_70 * 1e3, "mm", ref(9.67), true);
    add("pump_radius_at_distance", "pump radius at crystal II", w_pump_d * 1e3, "mm");
    add("spdc_radius_at_distance", "SPDC radius at crystal II", w_spdc_d * 1e3, "mm");
    add("pump_aperture_ratio", "pump diameter / aperture at crystal II", ap_pump.ratio, "");
    add("spdc_aperture_ratio", "SPDC diameter / aperture at crystal II", ap_spdc.ratio, "");

    const double t_coh = coherence::coherence_time(s.pump.spectrum);
    const auto layout = s.path_layout();
    const auto pc = coherence::pump_condition(layout);
    const auto dc = coherence::dc_condition(layout);
    rep.pump_condition = pc.satisfied;
    rep.dc_condition = dc.satisfied;
    add("pump_coherence_time", "pump coherence time", t_coh * 1e9, "ns", ref(2.0));
    add("pump_coherence_length", "pump coherence length", layout.pump_coh_len * 1e3, "mm", ref(596.0), true);
    add("pump_condition_margin", "pump path condition margin", pc.margin * 1e3, "mm");
    add("dc_condition_margin", "down-conversion path condition margin", dc.margin * 1e3, "mm");
    add("vis_pump", "pump coherence visibility factor", s.vis_pump(), "");
    add("turbulence_angle_scale", "angular coupling scale", s.angle_scale() * 1e3, "mrad");
    add("turbulence_sigma_angle", "arrival-angle std", s.sigma_angle() * 1e3, "mrad");
    return rep;
}

Json AuditReport::to_json() const {
    Json j;
    j["scenario"] = scenario;
    j["distance_m"] = distance;
    j["pump_condition"] = pump_condition;
    j["dc_condition"] = dc_condition;
    j["pump_aperture_pass"] = pump_aperture_pass;
    j["spdc_aperture_pass"] = spdc_aperture_pass;
    j["golden_ok"] = golden_ok();
    Json rows_json = Json::array();
    for (const auto& r : rows) {
        Json row{{"key", r.key}, {"label", r.label}, {"value", num(r.value)}, {"unit", r.unit}};
        row["reference"] = r.reference ? num(*r.reference) : Json(nullptr);
        if (r.reference) row["relative_deviation"] = num(r.value / *r.reference - 1.0);
        row["golden"] = r.golden;
        rows_json.push_back(std::move(row));
    }
    j["rows"] = std::move(rows_json);
    return j;
}

std::string AuditReport::table() const {
    std::string out = fmt::format("optics and coherence audit: {} (distance {:g} m)\n", scenario, distance);
    out += fmt::format("  {:<42} {:>12} {:<7} {:>12} {:>9}\n", "quantity", "value", "unit", "reference", "dev");
    for (const auto& r : rows) {
        std::string ref_text = "-";
        std::string dev_text = "";
        if (r.reference) {
            ref_text = fmt::format("{:.6g}", *r.reference);
            dev_text = fmt::format("{:+.2f}%", 100.0 * (r.value / *r.reference - 1.0));
            if (r.golden) dev_text += r.within(0.01) ? " ok" : " FAIL";
        }
        out += fmt::format("  {:<42} {:>12.6g} {:<7} {:>12} {:>9}\n", r.label, r.value, r.unit, ref_text, dev_text);
    }
    out += fmt::format("  pump path condition: {}   down-conversion path condition: {}\n",
                       pump_condition ? "satisfied" : "VIOLATED", dc_condition ? "satisfied" : "VIOLATED");
    out += fmt::format("  aperture at crystal II: pump {}, SPDC {}\n", pump_aperture_pass ? "pass" : "FAIL",
                       spdc_aperture_pass ? "pass" : "FAIL");
    return out;
}

std::string AuditReport::csv() const {
    std::string out = "scenario,key,value,unit,reference,golden\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{:.10g},{},{},{}\n", scenario, r.key, r.value, r.unit,
                           r.reference ? fmt::format("{:.10g}", *r.reference) : "", r.golden ? 1 : 0);
    }
    return out;
}

// ---- simulate ------------------------------------------------------------

coincidence::MatchOptions match_options(const scenario::Scenario& s) {
    coincidence::MatchOptions m;
    m.window = to_ps(s.detector.params.coincidence_window);
    m.span = coincidence::WindowSpan::total_width;
    m.mode = coincidence::MatchMode::greedy;
    return m;
}

SimulationRun simulate(const scenario::Scenario& s, std::uint64_t seed) {
    SimulationRun run;
    run.seed = seed;
    run.scan = tagsim::simulate_scan(scenario::to_scan_model(s), seed);
    run.coincidences = coincidence::count_coincidences(run.scan.signal, run.scan.idler, match_options(s));
    const double t_int = s.detector.params.integration_time;
    run.coincidences_trace = coincidence::bin_counts(run.coincidences, t_int, s.scan.duration);
    run.signal_trace = coincidence::bin_counts(run.scan.signal, t_int, s.scan.duration);
    run.idler_trace = coincidence::bin_counts(run.scan.idler, t_int, s.scan.duration);
    for (auto* t : {&run.coincidences_trace, &run.signal_trace, &run.idler_trace}) {
        annotate(*t, s);
        t->extra["seed"] = std::to_string(seed);
    }
    return run;
}

Json truth_json(const SimulationRun& run, const scenario::Scenario& s) {
    const auto& t = run.scan.truth;
    Json j;
    j["scenario"] = scenario::to_json(s);
    j["seed"] = run.seed;
    j["bin_duration_s"] = t.bin_duration;
    j["n_bins"] = t.pair_rate.size();
    j["mean_pair_rate_cps"] = t.mean_pair_rate;
    j["model_pair_visibility"] = tagsim::model_pair_visibility(scenario::to_scan_model(s));
    j["background_rate_signal_cps"] = t.background_rate_signal;
    j["background_rate_idler_cps"] = t.background_rate_idler;
    j["pairs_detected"] = t.pairs_detected;
    j["pairs_both_detected"] = t.pairs_both_detected;
    j["signal_tags"] = run.scan.signal.size();
    j["idler_tags"] = run.scan.idler.size();
    j["coincidences"] = run.coincidences.total;
    j["fringe_maxima"] = t.fringe_max_times.size();
    j["fringe_minima"] = t.fringe_min_times.size();
    j["fringe_max_times_s"] = t.fringe_max_times;
    j["fringe_min_times_s"] = t.fringe_min_times;
    j["expected_coincidences"] = t.expected_coincidences;
    j["expected_signal"] = t.expected_signal;
    j["expected_idler"] = t.expected_idler;
    j["gain"] = t.gain;
    j["phase_rad"] = t.phase;
    return j;
}

std::vector<fs::path> write_simulation(const SimulationRun& run, const scenario::Scenario& s, const fs::path& out_dir,
                                       Format tag_format) {
    ensure_dir(out_dir);
    std::vector<fs::path> written;
    const fs::path tags = out_dir / (tag_format == Format::csv ? "tags.csv" : "tags.ptag");
    tagio::write_file(tags, run.scan.signal, run.scan.idler);
    written.push_back(tags);
    const std::pair<const FringeTrace*, const char*> traces[] = {
        {&run.coincidences_trace, "coincidences.csv"},
        {&run.signal_trace, "signal.csv"},
        {&run.idler_trace, "idler.csv"},
    };
    for (const auto& [trace, name] : traces) {
        write_trace_file(out_dir / name, *trace);
        written.push_back(out_dir / name);
    }
    write_text(out_dir / "truth.json", truth_json(run, s).dump(2) + "\n");
    written.push_back(out_dir / "truth.json");
    return written;
}

// ---- analyze -------------------------------------------------------------

const ChannelReport* RunReport::channel(std::string_view kind) const {
    for (const auto& c : channels) {
        if (c.analysis.kind == kind) return &c;
    }
    return nullptr;
}

bool RunReport::degenerate() const {
    if (const auto* c = channel(kCoincidences)) return c->analysis.degenerate;
    return std::any_of(channels.begin(), channels.end(), [](const auto& c) { return c.analysis.degenerate; });
}

RunReport analyze_traces(const std::vector<FringeTrace>& traces, const AnalyzeOptions& options) {
    RunReport rep;
    for (const auto& trace : traces) {
        analysis::TraceAnalysisOptions opt;
        opt.period_bins = options.period_bins;
        opt.monte_carlo = options.monte_carlo;
        opt.monte_carlo.seed = analysis_seed(options.monte_carlo.seed, trace.kind);
        ChannelReport c;
        c.analysis = analysis::analyze_trace(trace, opt);
        if (!options.keep_samples) {
            c.analysis.estimate.samples.clear();
            c.analysis.estimate.samples.shrink_to_fit();
        }
        c.n_bins = trace.size();
        c.mean_counts = trace.size() ? trace.total() / static_cast<double>(trace.size()) : 0.0;
        if (rep.distance < 0.0 && trace.distance >= 0.0) rep.distance = trace.distance;
        rep.channels.push_back(std::move(c));
    }
    rep.seed = options.monte_carlo.seed;
    return rep;
}

RunReport run_analyze(const std::vector<fs::path>& trace_files, const AnalyzeOptions& options) {
    if (trace_files.empty()) throw ValidationError("traces", "no trace files given");
    std::vector<FringeTrace> traces;
    for (const auto& path : trace_files) {
        FringeTrace t = read_trace_file(path);
        if (t.kind.empty()) t.kind = path.stem().string();
        traces.push_back(std::move(t));
    }
    RunReport rep = analyze_traces(traces, options);
    // presets carry published numbers to compare against
    for (const auto& t : traces) {
        if (auto it = t.extra.find("scenario"); it != t.extra.end() && scenario::is_preset(it->second)) {
            const auto s = scenario::preset(it->second);
            if (s.reference && t.distance == s.distance) rep.reference = s.reference;
            rep.scenario = scenario::to_json(s);
            break;
        }
    }
    return rep;
}

Json RunReport::to_json() const {
    Json j;
    if (scenario) j["scenario"] = *scenario;
    j["distance_m"] = distance >= 0.0 ? Json(distance) : Json(nullptr);
    j["analysis_seed"] = seed;
    j["degenerate"] = degenerate();
    Json ch = Json::object();
    for (const auto& c : channels) ch[c.analysis.kind] = estimate_json(c);
    j["channels"] = std::move(ch);
    if (audit) j["audit"] = audit->to_json();
    if (reference) {
        const auto& r = *reference;
        Json cmp = Json::array();
        const auto add = [&](std::string_view kind, double v, double sd, double sn) {
            const auto* c = channel(kind);
            if (!c || c->analysis.degenerate) return;
            cmp.push_back({{"kind", kind},
                           {"visibility", num(c->analysis.estimate.mean)},
                           {"reference_visibility", v},
                           {"std", num(c->analysis.estimate.std)},
                           {"reference_std", sd},
                           {"shot_noise_error", num(c->analysis.shot_noise_error)},
                           {"reference_shot_noise_error", sn}});
        };
        add(kCoincidences, r.vis_coincidences, r.vis_coincidences_std, r.shot_noise_coincidences);
        add(kSignal, r.vis_signal, r.vis_signal_std, r.shot_noise_signal);
        add(kIdler, r.vis_idler, r.vis_idler_std, r.shot_noise_idler);
        j["reference_comparison"] = std::move(cmp);
    }
    return j;
}

std::string RunReport::csv() const {
    std::string out =
        "kind,distance_m,n_bins,mean_counts,n_maxima,n_minima,max_mean,min_mean,visibility_mean,visibility_std,"
        "visibility_point,shot_noise_error,fit_visibility,degenerate\n";
    for (const auto& c : channels) {
        const auto& a = c.analysis;
        out += fmt::format("{},{:.6g},{},{:.6g},{},{},{:.6g},{:.6g},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", a.kind,
                           distance, c.n_bins, c.mean_counts, a.extrema.maxima.size(), a.extrema.minima.size(),
                           a.extrema.max_mean(), a.extrema.min_mean(), a.estimate.mean, a.estimate.std,
                           a.estimate.point, a.shot_noise_error, a.fit.visibility(), a.degenerate ? 1 : 0);
    }
    return out;
}

std::string RunReport::summary() const {
    std::string out;
    if (distance >= 0.0) out += fmt::format("distance: {:g} m\n", distance);
    for (const auto& c : channels) {
        const auto& a = c.analysis;
        out += fmt::format("{:<13} bins {:>5}  mean {:>9.2f}/bin  maxima {:>3}  minima {:>3}  ", a.kind, c.n_bins,
                           c.mean_counts, a.extrema.maxima.size(), a.extrema.minima.size());
        if (a.degenerate) {
            out += "degenerate: " + a.degenerate_reason + "\n";
            continue;
        }
        out += fmt::format("V = {:6.2f}% +- {:5.2f}%  (shot noise +- {:5.2f}%, fit {:6.2f}%)\n", 100.0 * a.estimate.mean,
                           100.0 * a.estimate.std, 100.0 * a.shot_noise_error, 100.0 * a.fit.visibility());
    }
    if (reference) {
        const auto& r = *reference;
        out += fmt::format("published: coincidences {:.2f}% +- {:.2f}%, signal {:.2f}% +- {:.2f}%, idler {:.2f}% +- {:.2f}%\n",
                           100 * r.vis_coincidences, 100 * r.vis_coincidences_std, 100 * r.vis_signal,
                           100 * r.vis_signal_std, 100 * r.vis_idler, 100 * r.vis_idler_std);
    }
    return out;
}

std::vector<fs::path> write_report(const RunReport& report, const fs::path& out_dir, Format format) {
    ensure_dir(out_dir);
    std::vector<fs::path> written;
    if (format == Format::json) {
        write_text(out_dir / "report.json", report.to_json().dump(2) + "\n");
        written.push_back(out_dir / "report.json");
    } else {
        write_text(out_dir / "report.csv", report.csv());
        written.push_back(out_dir / "report.csv");
    }
    write_text(out_dir / "summary.txt", report.summary());
    written.push_back(out_dir / "summary.txt");
    for (const auto& c : report.channels) {
        if (c.analysis.degenerate) continue;
        const auto path = out_dir / ("histogram_" + c.analysis.kind + ".csv");
        write_text(path, histogram_csv(c.analysis.estimate.histogram));
        written.push_back(path);
    }
    return written;
}

// ---- extrapolate ---------------------------------------------------------

ExtrapolationReport extrapolate(const std::vector<analysis::DistancePoint>& points) {
    ExtrapolationReport rep;
    rep.points = points;
    rep.fit = analysis::linear_visibility_extrapolation(points);
    rep.v_250 = rep.fit.value_at(250.0);
    rep.v_500 = rep.fit.value_at(500.0);
    rep.distance_at_50 = rep.fit.distance_at(0.5);
    rep.distance_at_10 = rep.fit.distance_at(0.1);
    if (rep.fit.slope >= 0.0) rep.flags.push_back("visibility does not decrease with distance");
    for (const double d : {rep.distance_at_50, rep.distance_at_10}) {
        if (std::isinf(d)) {
            rep.flags.push_back("level never reached: distance is infinite");
            break;
        }
    }
    if (rep.v_500 < 0.0) rep.flags.push_back("linear model is negative at 500 m");
    return rep;
}

ExtrapolationReport run_extrapolate(const std::vector<fs::path>& files) {
    std::vector<analysis::DistancePoint> points;
    for (const auto& path : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ParseError("cannot open " + path.string());
        if (path.extension() == ".csv") {
            std::string line;
            bool header = true;
            while (std::getline(in, line)) {
                if (line.empty() || line.front() == '#') continue;
                if (header) {
                    header = false;
                    if (line.rfind("distance_m,visibility", 0) == 0) continue;
                }
                const auto comma = line.find(',');
                if (comma == std::string::npos) throw ParseError(path.string() + ": expected distance_m,visibility");
                try {
                    points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
                } catch (const std::exception&) {
                    throw ParseError(path.string() + ": bad row '" + line + "'");
                }
            }
            continue;
        }
        Json j;
        try {
            j = Json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(path.string() + ": " + e.what());
        }
        const auto& d = j["distance_m"];
        const auto* v = j.contains("channels") && j["channels"].contains("coincidences")
                            ? &j["channels"]["coincidences"]
                            : nullptr;
        if (!d.is_number() || !v || !v->contains("visibility")) {
            throw ParseError(path.string() + ": report lacks distance_m or a coincidence visibility");
        }
        points.push_back({d.get<double>(), (*v)["visibility"]["mean"].get<double>()});
    }
    if (points.size() < 2) throw ValidationError("reports", "need at least two distances");
    return extrapolate(points);
}

Json ExtrapolationReport::to_json() const {
    Json pts = Json::array();
    for (const auto& p : points) pts.push_back({{"distance_m", p.distance}, {"visibility", p.visibility}});
    Json j;
    j["points"] = std::move(pts);
    j["slope_per_m"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["visibility_at_250m"] = num(v_250);
    j["visibility_at_500m"] = num(v_500);
    j["distance_at_50pct_m"] = num(distance_at_50);
    j["distance_at_10pct_m"] = num(distance_at_10);
    j["flags"] = flags;
    return j;
}

std::string ExtrapolationReport::csv() const {
    return fmt::format(
        "slope_per_m,intercept,visibility_at_250m,visibility_at_500m,distance_at_50pct_m,distance_at_10pct_m\n"
        "{:.8g},{:.8g},{:.8g},{:.8g},{:.8g},{:.8g}\n",
        fit.slope, fit.intercept, v_250, v_500, distance_at_50, distance_at_10);
}

std::string ExtrapolationReport::summary() const {
    std::string out = fmt::format("linear fit over {} points: V(d) = {:.4f} {:+.6f} d\n", points.size(), fit.intercept,
                                  fit.slope);
    out += fmt::format("  V(250 m) = {:.2f}%   V(500 m) = {:.2f}%\n", 100 * v_250, 100 * v_500);
    out += fmt::format("  V = 50% at {:.1f} m   V = 10% at {:.1f} m\n", distance_at_50, distance_at_10);
    for (const auto& f : flags) out += "  note: " + f + "\n";
    return out;
}

// ---- ensembles -----------------------------------------------------------

EnsembleMember run_member(const scenario::Scenario& s, std::uint64_t seed) {
    const SimulationRun run = simulate(s, seed);
    AnalyzeOptions opt;
    opt.monte_carlo.n_samples = s.analysis.mc_samples;
    opt.monte_carlo.mode = s.analysis.mode;
    opt.monte_carlo.seed = seed;
    const RunReport rep = analyze_traces({run.coincidences_trace, run.signal_trace, run.idler_trace}, opt);
    EnsembleMember m;
    m.seed = seed;
    const auto& c = rep.channel(kCoincidences)->analysis;
    m.degenerate = c.degenerate;
    m.n_maxima = c.extrema.maxima.size();
    m.n_minima = c.extrema.minima.size();
    m.max_mean = c.extrema.max_mean();
    m.min_mean = c.extrema.min_mean();
    if (!c.degenerate) {
        m.mean = c.estimate.mean;
        m.std = c.estimate.std;
        m.point = c.estimate.point;
        m.shot_noise = c.shot_noise_error;
    }
    const auto* sig = rep.channel(kSignal);
    const auto* idl = rep.channel(kIdler);
    m.signal_mean = sig && !sig->analysis.degenerate ? sig->analysis.estimate.mean : 0.0;
    m.idler_mean = idl && !idl->analysis.degenerate ? idl->analysis.estimate.mean : 0.0;
    return m;
}

namespace {

EnsembleSummary summarize(const scenario::Scenario& s, std::vector<EnsembleMember> members) {
    EnsembleSummary out;
    out.scenario = s.name;
    out.distance = s.distance;
    std::vector<double> means, stds, shot, max_means, sig, idl;
    for (const auto& m : members) {
        if (m.degenerate) {
            ++out.degenerate;
            continue;
        }
        means.push_back(m.mean);
        stds.push_back(m.std);
        shot.push_back(m.shot_noise);
        max_means.push_back(m.max_mean);
        sig.push_back(m.signal_mean);
        idl.push_back(m.idler_mean);
    }
    out.members = std::move(members);
    out.mean_visibility = mean_of(means);
    out.spread_of_means = stddev_of(means);
    out.mean_std = mean_of(stds);
    out.mean_shot_noise = mean_of(shot);
    out.mean_max_counts = mean_of(max_means);
    out.signal_visibility = mean_of(sig);
    out.idler_visibility = mean_of(idl);
    return out;
}

}  // namespace

EnsembleSummary run_ensemble_serial(const scenario::Scenario& s, std::uint64_t seed0, std::size_t n) {
    std::vector<EnsembleMember> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = run_member(s, seed0 + i);
    return summarize(s, std::move(members));
}

EnsembleSummary run_ensemble(const scenario::Scenario& s, std::uint64_t seed0, std::size_t n) {
    std::vector<EnsembleMember> members(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            members[static_cast<std::size_t>(i)] = run_member(s, seed0 + static_cast<std::uint64_t>(i));
        } catch (...) {
#pragma omp critical(pathid_ensemble_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return summarize(s, std::move(members));
}

Json EnsembleSummary::to_json() const {
    Json j;
    j["scenario"] = scenario;
    j["distance_m"] = distance;
    j["runs"] = members.size();
    j["degenerate_runs"] = degenerate;
    j["mean_visibility"] = mean_visibility;
    j["spread_of_means"] = spread_of_means;
    j["mean_std"] = mean_std;
    j["mean_shot_noise"] = mean_shot_noise;
    j["mean_max_counts"] = mean_max_counts;
    j["signal_visibility"] = signal_visibility;
    j["idler_visibility"] = idler_visibility;
    Json ms = Json::array();
    for (const auto& m : members) {
        ms.push_back({{"seed", m.seed},
                      {"degenerate", m.degenerate},
                      {"mean", m.mean},
                      {"std", m.std},
                      {"point", m.point},
                      {"shot_noise", m.shot_noise},
                      {"max_mean", m.max_mean},
                      {"min_mean", m.min_mean},
                      {"n_maxima", m.n_maxima},
                      {"n_minima", m.n_minima},
                      {"signal_mean", m.signal_mean},
                      {"idler_mean", m.idler_mean}});
    }
    j["members"] = std::move(ms);
    return j;
}

// ---- reproduce -----------------------------------------------------------

ReproduceReport run_reproduce(std::uint64_t seed0, std::size_t runs) {
    ReproduceReport rep;
    std::vector<analysis::DistancePoint> sim_points, ref_points;
    for (const auto& name : scenario::preset_names()) {
        const auto s = scenario::load_scenario(name);
        rep.audits.push_back(run_audit(s));
        rep.ensembles.push_back(run_ensemble(s, seed0, runs));
        rep.references.push_back(s.reference.value_or(scenario::ReferenceValues{}));
        sim_points.push_back({s.distance, rep.ensembles.back().mean_visibility});
        ref_points.push_back({s.distance, rep.references.back().vis_coincidences});
    }
    rep.simulated_extrapolation = extrapolate(sim_points);
    rep.reference_extrapolation = extrapolate(ref_points);
    return rep;
}

Json ReproduceReport::to_json() const {
    Json j;
    Json presets = Json::array();
    for (std::size_t i = 0; i < ensembles.size(); ++i) {
        const auto& e = ensembles[i];
        const auto& r = references[i];
        Json row;
        row["scenario"] = e.scenario;
        row["distance_m"] = e.distance;
        row["audit_golden_ok"] = audits[i].golden_ok();
        row["visibility"] = e.mean_visibility;
        row["reference_visibility"] = r.vis_coincidences;
        row["std"] = e.mean_std;
        row["reference_std"] = r.vis_coincidences_std;
        row["shot_noise"] = e.mean_shot_noise;
        row["reference_shot_noise"] = r.shot_noise_coincidences;
        row["signal_visibility"] = e.signal_visibility;
        row["reference_signal_visibility"] = r.vis_signal;
        row["idler_visibility"] = e.idler_visibility;
        row["reference_idler_visibility"] = r.vis_idler;
        row["ensemble"] = e.to_json();
        row["audit"] = audits[i].to_json();
        presets.push_back(std::move(row));
    }
    j["presets"] = std::move(presets);
    j["extrapolation_simulated"] = simulated_extrapolation.to_json();
    j["extrapolation_reference"] = reference_extrapolation.to_json();
    return j;
}

std::string ReproduceReport::csv() const {
    std::string out =
        "scenario,distance_m,runs,visibility,reference_visibility,std,reference_std,shot_noise,"
        "reference_shot_noise,signal_visibility,reference_signal_visibility,idler_visibility,"
        "reference_idler_visibility,audit_golden_ok\n";
    for (std::size_t i = 0; i < ensembles.size(); ++i) {
        const auto& e = ensembles[i];
        const auto& r = references[i];
        out += fmt::format("{},{:g},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n",
                           e.scenario, e.distance, e.members.size(), e.mean_visibility, r.vis_coincidences, e.mean_std,
                           r.vis_coincidences_std, e.mean_shot_noise, r.shot_noise_coincidences, e.signal_visibility,
                           r.vis_signal, e.idler_visibility, r.vis_idler, audits[i].golden_ok() ? 1 : 0);
    }
    return out;
}

std::string ReproduceReport::table() const {
    std::string out;
    for (const auto& a : audits) out += a.table() + "\n";
    out += "coincidence visibility, simulated ensemble vs published\n";
    out += fmt::format("  {:<10} {:>5} {:>15} {:>15} {:>9} {:>9} {:>10} {:>10}\n", "scenario", "runs", "V sim",
                       "V published", "std sim", "std pub", "shot sim", "shot pub");
    for (std::size_t i = 0; i < ensembles.size(); ++i) {
        const auto& e = ensembles[i];
        const auto& r = references[i];
        out += fmt::format("  {:<10} {:>5} {:>14.2f}% {:>14.2f}% {:>8.2f}% {:>8.2f}% {:>9.2f}% {:>9.2f}%\n", e.scenario,
                           e.members.size(), 100 * e.mean_visibility, 100 * r.vis_coincidences, 100 * e.mean_std,
                           100 * r.vis_coincidences_std, 100 * e.mean_shot_noise, 100 * r.shot_noise_coincidences);
    }
    out += "singles visibility, simulated vs published\n";
    for (std::size_t i = 0; i < ensembles.size(); ++i) {
        const auto& e = ensembles[i];
        const auto& r = references[i];
        out += fmt::format("  {:<10} signal {:6.2f}% ({:6.2f}%)   idler {:6.2f}% ({:6.2f}%)\n", e.scenario,
                           100 * e.signal_visibility, 100 * r.vis_signal, 100 * e.idler_visibility, 100 * r.vis_idler);
    }
    out += "\nextrapolation, simulated means\n" + simulated_extrapolation.summary();
    out += "extrapolation, published means\n" + reference_extrapolation.summary();
    return out;
}

}  // namespace pathid::pipeline
