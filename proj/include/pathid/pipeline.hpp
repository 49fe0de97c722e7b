#pragma once

// End-to-end runs behind the command-line tool: simulate a scan and write its
// files, analyze fringe traces, audit a scenario's optics, extrapolate
// visibility over distance and run seed ensembles of the presets.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pathid/coincidence.hpp"
#include "pathid/fringe_analysis.hpp"
#include "pathid/fringe_trace.hpp"
#include "pathid/scenario.hpp"
#include "pathid/tagsim.hpp"

namespace pathid::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

enum class Format { csv, json };

// ---- audit ---------------------------------------------------------------

struct AuditRow {
    std::string key;
    std::string label;
    double value = 0.0;  // in `unit`
    std::string unit;
    std::optional<double> reference;  // published value in `unit`
    bool golden = false;              // part of the 1% reference check

    // |value / reference - 1| <= tolerance; true when there is no reference.
    bool within(double tolerance = 0.01) const;
};

struct AuditReport {
    std::string scenario;
    double distance = 0.0;
    std::vector<AuditRow> rows;
    bool pump_condition = false;
    bool dc_condition = false;
    bool pump_aperture_pass = false;
    bool spdc_aperture_pass = false;

    const AuditRow& row(std::string_view key) const;
    // All golden rows within 1%.
    bool golden_ok() const;
    Json to_json() const;
    std::string table() const;
    std::string csv() const;
};

AuditReport run_audit(const scenario::Scenario& s);

// ---- simulate ------------------------------------------------------------

struct SimulationRun {
    std::uint64_t seed = 0;
    tagsim::ScanResult scan;
    coincidence::CoincidenceResult coincidences;
    FringeTrace coincidences_trace;
    FringeTrace signal_trace;
    FringeTrace idler_trace;
};

coincidence::MatchOptions match_options(const scenario::Scenario& s);

SimulationRun simulate(const scenario::Scenario& s, std::uint64_t seed);

// Writes tags.ptag (tags.csv for Format::csv), coincidences.csv, signal.csv,
// idler.csv and truth.json into out_dir. Returns the written paths.
std::vector<fs::path> write_simulation(const SimulationRun& run, const scenario::Scenario& s, const fs::path& out_dir,
                                       Format tag_format = Format::json);

Json truth_json(const SimulationRun& run, const scenario::Scenario& s);

// ---- analyze -------------------------------------------------------------

struct ChannelReport {
    analysis::TraceAnalysis analysis;
    double mean_counts = 0.0;
    std::size_t n_bins = 0;
};

struct RunReport {
    std::optional<Json> scenario;  // echo, when the traces came from a known scenario
    std::optional<AuditReport> audit;
    std::optional<scenario::ReferenceValues> reference;
    double distance = -1.0;
    std::uint64_t seed = 0;
    std::vector<ChannelReport> channels;

    const ChannelReport* channel(std::string_view kind) const;
    // True when the coincidence trace (or, without one, any trace) is degenerate.
    bool degenerate() const;
    Json to_json() const;
    std::string csv() const;
    std::string summary() const;
};

struct AnalyzeOptions {
    analysis::MonteCarloOptions monte_carlo;
    double period_bins = 0.0;  // 0: from trace metadata
    bool keep_samples = false;
};

RunReport analyze_traces(const std::vector<FringeTrace>& traces, const AnalyzeOptions& options);

// Reads trace CSVs; each file's `kind` metadata names its channel.
RunReport run_analyze(const std::vector<fs::path>& trace_files, const AnalyzeOptions& options);

// report.json or report.csv, summary.txt and one histogram_<kind>.csv per
// channel. Returns the written paths.
std::vector<fs::path> write_report(const RunReport& report, const fs::path& out_dir, Format format);

// ---- extrapolate ---------------------------------------------------------

struct ExtrapolationReport {
    std::vector<analysis::DistancePoint> points;
    analysis::LinearFit fit;
    double v_250 = 0.0;
    double v_500 = 0.0;
    double distance_at_50 = 0.0;
    double distance_at_10 = 0.0;
    std::vector<std::string> flags;

    Json to_json() const;
    std::string csv() const;
    std::string summary() const;
};

ExtrapolationReport extrapolate(const std::vector<analysis::DistancePoint>& points);

// Accepts report JSON files written by write_report (distance and mean
// coincidence visibility) and CSV files with "distance_m,visibility" rows.
ExtrapolationReport run_extrapolate(const std::vector<fs::path>& files);

// ---- ensembles -----------------------------------------------------------

struct EnsembleMember {
    std::uint64_t seed = 0;
    bool degenerate = false;
    double mean = 0.0;  // Monte-Carlo mean visibility of the coincidences
    double std = 0.0;   // width of that run's Monte-Carlo distribution
    double point = 0.0;
    double shot_noise = 0.0;
    double max_mean = 0.0;
    double min_mean = 0.0;
    std::size_t n_maxima = 0;
    std::size_t n_minima = 0;
    double signal_mean = 0.0;
    double idler_mean = 0.0;
};

struct EnsembleSummary {
    std::string scenario;
    double distance = 0.0;
    std::vector<EnsembleMember> members;
    std::size_t degenerate = 0;
    double mean_visibility = 0.0;  // average of the per-run means
    double spread_of_means = 0.0;  // standard deviation of the per-run means
    double mean_std = 0.0;         // average of the per-run distribution widths
    double mean_shot_noise = 0.0;
    double mean_max_counts = 0.0;
    double signal_visibility = 0.0;
    double idler_visibility = 0.0;

    Json to_json() const;
};

// Runs seeds seed0 .. seed0 + n - 1. The OpenMP version distributes runs over
// threads; both return identical summaries.
EnsembleSummary run_ensemble(const scenario::Scenario& s, std::uint64_t seed0, std::size_t n);
EnsembleSummary run_ensemble_serial(const scenario::Scenario& s, std::uint64_t seed0, std::size_t n);

// One ensemble member; exposed for tests and benchmarks.
EnsembleMember run_member(const scenario::Scenario& s, std::uint64_t seed);

// ---- reproduce -----------------------------------------------------------

struct ReproduceReport {
    std::vector<AuditReport> audits;
    std::vector<EnsembleSummary> ensembles;
    std::vector<scenario::ReferenceValues> references;
    ExtrapolationReport simulated_extrapolation;
    ExtrapolationReport reference_extrapolation;

    Json to_json() const;
    std::string csv() const;
    std::string table() const;
};

ReproduceReport run_reproduce(std::uint64_t seed0, std::size_t runs);

}  // namespace pathid::pipeline
