// Command-line front end: simulate, analyze, audit, extrapolate, reproduce.
//
// Exit codes: 0 success, 1 I/O or internal error, 2 invalid input
// (command line, scenario parse or validation), 3 degenerate analysis.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pathid/coincidence.hpp"
#include "pathid/error.hpp"
#include "pathid/pipeline.hpp"
#include "pathid/scenario.hpp"
#include "pathid/tag_io.hpp"
#include "pathid/units.hpp"

namespace fs = std::filesystem;
using namespace pathid;

namespace {

enum Exit : int { ok = 0, io_error = 1, invalid = 2, degenerate = 3 };

struct Common {
    std::string scenario = "paper_2m";
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "json";

    pipeline::Format fmt() const { return format == "csv" ? pipeline::Format::csv : pipeline::Format::json; }
};

void add_common(CLI::App* app, Common& c, bool with_scenario) {
    if (with_scenario) {
        app->add_option("--scenario", c.scenario, "scenario file or preset name (paper_2m, paper_20m, paper_70m)")
            ->capture_default_str();
    }
    app->add_option("--seed", c.seed, "random seed (default: the scenario's seed)");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--format", c.format, "report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void write_output(const fs::path& dir, const std::string& name, const std::string& text) {
    fs::create_directories(dir);
    const auto path = dir / name;
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot write " + path.string());
    const bool good = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !good) throw std::runtime_error("write failed: " + path.string());
    fmt::print("  wrote {}\n", path.string());
}

int cmd_simulate(const Common& c, const std::string& tag_format) {
    const auto s = scenario::load_scenario(c.scenario);
    const std::uint64_t seed = c.seed.value_or(s.seed);
    const fs::path out = c.out.empty() ? fs::path("out") / s.name : fs::path(c.out);
    const auto run = pipeline::simulate(s, seed);
    const auto files =
        pipeline::write_simulation(run, s, out, tag_format == "csv" ? pipeline::Format::csv : pipeline::Format::json);
    fmt::print("{}: seed {}, {} signal and {} idler tags, {} coincidences in {} bins\n", s.name, seed,
               run.scan.signal.size(), run.scan.idler.size(), run.coincidences.total, run.coincidences_trace.size());
    for (const auto& f : files) fmt::print("  wrote {}\n", f.string());
    return ok;
}

int cmd_analyze(const Common& c, const std::vector<std::string>& traces, std::size_t samples,
                const std::string& mode, double period_bins) {
    std::vector<fs::path> files(traces.begin(), traces.end());
    pipeline::AnalyzeOptions opt;
    opt.monte_carlo.n_samples = samples;
    opt.monte_carlo.mode = mode == "pooled" ? analysis::ResampleMode::pooled : analysis::ResampleMode::paired;
    opt.monte_carlo.seed = c.seed.value_or(1);
    opt.period_bins = period_bins;
    auto report = pipeline::run_analyze(files, opt);
    if (report.scenario && scenario::is_preset((*report.scenario)["name"].get<std::string>())) {
        report.audit = pipeline::run_audit(scenario::preset((*report.scenario)["name"].get<std::string>()));
    }
    std::cout << report.summary();
    if (!c.out.empty()) {
        for (const auto& f : pipeline::write_report(report, c.out, c.fmt())) fmt::print("  wrote {}\n", f.string());
    }
    if (report.degenerate()) {
        std::cerr << "analysis degenerate: no usable fringe in the coincidence trace\n";
        return degenerate;
    }
    return ok;
}

int cmd_audit(const Common& c) {
    const auto s = scenario::load_scenario(c.scenario);
    const auto audit = pipeline::run_audit(s);
    std::cout << audit.table();
    if (!c.out.empty()) {
        const bool csv = c.fmt() == pipeline::Format::csv;
        write_output(c.out, csv ? "audit.csv" : "audit.json", csv ? audit.csv() : audit.to_json().dump(2) + "\n");
    }
    return ok;
}

int cmd_extrapolate(const Common& c, const std::vector<std::string>& reports) {
    const auto rep = pipeline::run_extrapolate(std::vector<fs::path>(reports.begin(), reports.end()));
    std::cout << rep.summary();
    if (!c.out.empty()) {
        const bool csv = c.fmt() == pipeline::Format::csv;
        write_output(c.out, csv ? "extrapolation.csv" : "extrapolation.json",
                     csv ? rep.csv() : rep.to_json().dump(2) + "\n");
    }
    return ok;
}

int cmd_reproduce(const Common& c, std::size_t runs) {
    const auto rep = pipeline::run_reproduce(c.seed.value_or(1), runs);
    std::cout << rep.table();
    if (!c.out.empty()) {
        const bool csv = c.fmt() == pipeline::Format::csv;
        write_output(c.out, csv ? "reproduce.csv" : "reproduce.json",
                     csv ? rep.csv() : rep.to_json().dump(2) + "\n");
    }
    return ok;
}

int cmd_ensemble(const Common& c, std::size_t runs) {
    const auto s = scenario::load_scenario(c.scenario);
    const auto e = pipeline::run_ensemble(s, c.seed.value_or(s.seed), runs);
    fmt::print("{}: {} runs ({} degenerate)\n", e.scenario, e.members.size(), e.degenerate);
    fmt::print("  coincidence visibility {:.2f}% (spread of run means {:.2f}%), mean distribution std {:.2f}%\n",
               100 * e.mean_visibility, 100 * e.spread_of_means, 100 * e.mean_std);
    fmt::print("  shot-noise bound {:.2f}%, mean maximum {:.1f} counts/bin\n", 100 * e.mean_shot_noise,
               e.mean_max_counts);
    fmt::print("  singles visibility: signal {:.2f}%, idler {:.2f}%\n", 100 * e.signal_visibility,
               100 * e.idler_visibility);
    if (!c.out.empty()) write_output(c.out, "ensemble.json", e.to_json().dump(2) + "\n");
    return ok;
}

int cmd_correlate(const Common& c, const std::string& tags, const std::string& window, const std::string& bin) {
    const auto pair = tagio::read_file(tags);
    coincidence::MatchOptions opt;
    opt.window = to_ps(units::parse_as(window, units::kTime, "--window"));
    const double t_int = units::parse_as(bin, units::kTime, "--bin");
    const auto result = coincidence::count_coincidences_parallel(pair.signal, pair.idler, opt);
    const double duration = to_seconds(pair.signal.metadata.duration);
    fmt::print("{} signal, {} idler tags over {:.3f} s: {} coincidences ({:.2f} cps)\n", pair.signal.size(),
               pair.idler.size(), duration, result.total, duration > 0 ? result.total / duration : 0.0);
    if (duration > 0) {
        const auto offset = to_ps(std::min(100e-9, duration / 2));
        fmt::print("  delayed-window accidentals {:.4f} cps\n",
                   coincidence::accidental_estimate(pair.signal, pair.idler, opt, offset));
    }
    if (!c.out.empty()) {
        fs::create_directories(c.out);
        write_trace_file(fs::path(c.out) / "coincidences.csv", coincidence::bin_counts(result, t_int, duration));
        write_trace_file(fs::path(c.out) / "signal.csv", coincidence::bin_counts(pair.signal, t_int, duration));
        write_trace_file(fs::path(c.out) / "idler.csv", coincidence::bin_counts(pair.idler, t_int, duration));
        fmt::print("  wrote traces to {}\n", c.out);
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-source photon-pair interference: simulation and fringe analysis"};
    app.require_subcommand(1);

    Common sim_c, ana_c, aud_c, ext_c, rep_c, ens_c, cor_c;
    std::string tag_format = "ptag";
    auto* sim = app.add_subcommand("simulate", "simulate a trombone scan and write tags, traces and ground truth");
    add_common(sim, sim_c, true);
    sim->add_option("--tags", tag_format, "tag file format")->check(CLI::IsMember({"ptag", "csv"}))->capture_default_str();

    std::vector<std::string> traces;
    std::size_t samples = 100'000;
    std::string mode = "paired";
    double period_bins = 0.0;
    auto* ana = app.add_subcommand("analyze", "visibility analysis of fringe trace CSVs");
    add_common(ana, ana_c, false);
    ana->add_option("traces", traces, "trace CSV files")->required();
    ana->add_option("--samples", samples, "Monte-Carlo draws")->check(CLI::Range(10'000, 100'000'000))->capture_default_str();
    ana->add_option("--mode", mode, "Monte-Carlo resampling")->check(CLI::IsMember({"paired", "pooled"}))->capture_default_str();
    ana->add_option("--period-bins", period_bins, "fringe period in bins (default: from trace metadata)");

    auto* aud = app.add_subcommand("audit", "tabulate beam optics and coherence numbers of a scenario");
    add_common(aud, aud_c, true);

    std::vector<std::string> reports;
    auto* ext = app.add_subcommand("extrapolate", "linear visibility-vs-distance extrapolation over reports");
    add_common(ext, ext_c, false);
    ext->add_option("reports", reports, "report.json files or distance_m,visibility CSVs")->required();

    std::size_t runs = 100;
    auto* rep = app.add_subcommand("reproduce", "run every preset ensemble and compare with published values");
    add_common(rep, rep_c, false);
    rep->add_option("--runs", runs, "seeds per preset")->check(CLI::Range(2, 100'000))->capture_default_str();

    std::size_t ens_runs = 100;
    auto* ens = app.add_subcommand("ensemble", "seed ensemble of one scenario");
    add_common(ens, ens_c, true);
    ens->add_option("--runs", ens_runs, "number of seeds")->check(CLI::Range(1, 100'000))->capture_default_str();

    std::string tag_file, window = "1.5 ns", bin = "70 ms";
    auto* cor = app.add_subcommand("correlate", "count coincidences in a tag file and bin the traces");
    add_common(cor, cor_c, false);
    cor->add_option("tags", tag_file, "PTAG or tag CSV file")->required();
    cor->add_option("--window", window, "total coincidence window")->capture_default_str();
    cor->add_option("--bin", bin, "integration time per bin")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : invalid;
    }

    try {
        if (*sim) return cmd_simulate(sim_c, tag_format);
        if (*ana) return cmd_analyze(ana_c, traces, samples, mode, period_bins);
        if (*aud) return cmd_audit(aud_c);
        if (*ext) return cmd_extrapolate(ext_c, reports);
        if (*rep) return cmd_reproduce(rep_c, runs);
        if (*ens) return cmd_ensemble(ens_c, ens_runs);
        if (*cor) return cmd_correlate(cor_c, tag_file, window, bin);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return invalid;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return invalid;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return invalid;
    } catch (const DegenerateInputError& e) {
        std::cerr << "analysis degenerate: " << e.what() << "\n";
        return degenerate;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return io_error;
    }
    return ok;
}
