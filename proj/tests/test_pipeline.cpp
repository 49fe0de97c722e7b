#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "oracles.hpp"
#include "pathid/error.hpp"
#include "pathid/pipeline.hpp"
#include "pathid/scenario.hpp"

using namespace pathid;
using namespace pathid::pipeline;
namespace fs = std::filesystem;

static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

static fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pathid_test_" + name);
    fs::remove_all(dir);
    return dir;
}

static scenario::Scenario short_2m() { return scenario::parse_scenario("base: paper_2m\nscan:\n  duration: 7 s\n"); }

TEST_CASE("audit reproduces the optics numbers") {
    for (const auto& name : scenario::preset_names()) {
        const auto a = run_audit(scenario::preset(name));
        CHECK(a.golden_ok());
        CHECK(a.row("pump_collimated_radius").value == doctest::Approx(2.58).epsilon(0.01));
        CHECK(a.row("spdc_collimated_radius").value == doctest::Approx(9.48).epsilon(0.01));
        CHECK(a.row("pump_link_rayleigh").value == doctest::Approx(51.6).epsilon(0.01));
        CHECK(a.row("spdc_link_rayleigh").value == doctest::Approx(348.6).epsilon(0.01));
        CHECK(a.row("pump_focused_rayleigh").value == doctest::Approx(4.85).epsilon(0.01));
        CHECK(a.row("pump_radius_70m").value == doctest::Approx(4.35).epsilon(0.01));
        CHECK(a.row("spdc_radius_70m").value == doctest::Approx(9.67).epsilon(0.01));
        CHECK(a.pump_aperture_pass);
        CHECK(a.spdc_aperture_pass);
        CHECK(a.pump_condition);
        CHECK(a.dc_condition);
    }
}

TEST_CASE("audit edge cases") {
    auto s = scenario::parse_scenario("base: paper_2m\ndistance: 0 m\n");
    auto a = run_audit(s);
    CHECK(a.row("pump_radius_at_distance").value == doctest::Approx(a.row("pump_collimated_radius").value));
    CHECK(a.row("spdc_radius_at_distance").value == doctest::Approx(a.row("spdc_collimated_radius").value));

    s = scenario::parse_scenario("base: paper_70m\nlink:\n  aperture_diameter: 5 mm\n");
    a = run_audit(s);
    CHECK_FALSE(a.pump_aperture_pass);
    CHECK_FALSE(a.spdc_aperture_pass);
    CHECK(a.row("spdc_aperture_ratio").value > 1.0);
}

TEST_CASE("simulation writes traces and is byte-identical per seed") {
    const auto s = short_2m();
    const auto d1 = scratch("sim1"), d2 = scratch("sim2"), d3 = scratch("sim3");
    const auto files = write_simulation(simulate(s, 5), s, d1);
    write_simulation(simulate(s, 5), s, d2);
    write_simulation(simulate(s, 6), s, d3);
    CHECK(files.size() == 5);
    bool any_differs = false;
    for (const auto& f : files) {
        CHECK(slurp(f) == slurp(d2 / f.filename()));
        any_differs = any_differs || slurp(f) != slurp(d3 / f.filename());
    }
    CHECK(any_differs);

    const auto trace = read_trace_file(d1 / "coincidences.csv");
    CHECK(trace.size() == 100);
    CHECK(trace.kind == "coincidences");
    CHECK(trace.distance == 2.0);
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d3);
}

TEST_CASE("full-length preset gives 1000 bins") {
    const auto run = simulate(scenario::preset("paper_2m"), 1);
    CHECK(run.coincidences_trace.size() == 1000);
    CHECK(run.signal_trace.size() == 1000);
}

TEST_CASE("zero-rate scenario") {
    const auto s = scenario::parse_scenario(
        "base: paper_2m\nscan:\n  duration: 7 s\nspdc:\n  pair_rate: 0 cps\ndetector:\n  dark_rate: 0 cps\n");
    const auto run = simulate(s, 1);
    CHECK(run.scan.signal.empty());
    CHECK(run.scan.idler.empty());
    CHECK(run.coincidences_trace.total() == 0.0);
    CHECK(run.coincidences_trace.size() == 100);
    const auto report = analyze_traces({run.coincidences_trace}, {});
    CHECK(report.degenerate());
}

TEST_CASE("analysis of a noiseless cosine") {
    FringeTrace t;
    t.counts = oracle::cosine_trace(1600, 60, 0.9, 16.0, 0.0);
    t.bin_duration = 0.07;
    t.kind = "coincidences";
    AnalyzeOptions opt;
    opt.period_bins = 16.0;
    const auto r = analyze_traces({t}, opt);
    CHECK_FALSE(r.degenerate());
    CHECK(std::abs(r.channel("coincidences")->analysis.estimate.point - 0.9) < 1e-6);
    CHECK(std::abs(r.channel("coincidences")->analysis.fit.visibility() - 0.9) < 1e-6);
}

TEST_CASE("analyze round trip through files") {
    const auto s = short_2m();
    const auto dir = scratch("ana");
    write_simulation(simulate(s, 2), s, dir);
    AnalyzeOptions opt;
    opt.monte_carlo.n_samples = 20'000;
    const auto r1 = run_analyze({dir / "coincidences.csv", dir / "signal.csv", dir / "idler.csv"}, opt);
    const auto r2 = run_analyze({dir / "coincidences.csv", dir / "signal.csv", dir / "idler.csv"}, opt);
    CHECK(r1.channels.size() == 3);
    CHECK(r1.distance == 2.0);
    CHECK_FALSE(r1.reference.has_value());  // references only for unmodified presets
    CHECK(read_trace_file(dir / "signal.csv").extra.at("scenario") == "paper_2m_custom");
    CHECK(r1.to_json().dump() == r2.to_json().dump());
    const auto* c = r1.channel("coincidences");
    REQUIRE(c != nullptr);
    CHECK(c->analysis.estimate.mean > 0.85);
    const auto out = write_report(r1, dir / "report", Format::json);
    CHECK(fs::exists(dir / "report" / "report.json"));
    CHECK(fs::exists(dir / "report" / "summary.txt"));
    CHECK(fs::exists(dir / "report" / "histogram_coincidences.csv"));

    std::ofstream(dir / "broken.csv") << "bin_index,bin_start_s,counts\n0,0,x\n";
    CHECK_THROWS_AS(run_analyze({dir / "broken.csv"}, opt), ParseError);
    fs::remove_all(dir);
}

TEST_CASE("extrapolation") {
    const auto rep = extrapolate({{2, 0.9615}, {20, 0.9205}, {70, 0.8390}});
    CHECK(rep.distance_at_50 == doctest::Approx(261.3).epsilon(2e-3));
    CHECK(rep.v_500 == doctest::Approx(0.079).epsilon(0.02));

    const auto flat = extrapolate({{2, 0.9}, {70, 0.9}});
    CHECK(std::isinf(flat.distance_at_50));
    CHECK_FALSE(flat.flags.empty());

    const auto dir = scratch("ext");
    fs::create_directories(dir);
    std::ofstream(dir / "points.csv") << "distance_m,visibility\n2,0.9615\n20,0.9205\n70,0.8390\n";
    std::ofstream(dir / "one.csv") << "distance_m,visibility\n2,0.9615\n";
    CHECK(run_extrapolate({dir / "points.csv"}).distance_at_50 == doctest::Approx(261.3).epsilon(2e-3));
    CHECK_THROWS_AS(run_extrapolate({dir / "one.csv"}), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("parallel ensemble equals the serial one") {
    const auto s = short_2m();
    const auto par = run_ensemble(s, 10, 4);
    const auto ser = run_ensemble_serial(s, 10, 4);
    CHECK(par.to_json().dump() == ser.to_json().dump());
    CHECK(par.members.size() == 4);
}
