#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "pathid/coincidence.hpp"
#include "pathid/error.hpp"
#include "pathid/tagsim.hpp"

using namespace pathid;
using namespace pathid::tagsim;

// A short, bright scan: 7 s, about 6 fringes, ~100 coincidences per bin at the maxima.
static ScanModel short_model() {
    ScanModel m;
    m.duration = 7.0;
    m.base_gain = 0.01;
    m.pair_rate_single = 2.4e5;
    m.mode_overlap = 0.97;
    m.detector.efficiency_s = 0.0375;
    m.detector.efficiency_i = 0.0375;
    m.detector.dark_rate = 200;
    m.detector.singles_background_fraction = 0.5;
    m.turbulence.angle_scale = 5e-3;
    return m;
}

TEST_CASE("thinning sampler: constant rate is Poisson") {
    const double r = 500.0, T = 2.0;
    int inside = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto t = thinned_poisson_times([&](double) { return r; }, T, 2 * r, seed);
        CHECK(std::is_sorted(t.begin(), t.end()));
        const double n = static_cast<double>(t.size());
        if (std::abs(n - r * T) <= 3 * std::sqrt(r * T)) ++inside;
    }
    CHECK(inside >= 97);

    // mean over seeds within 3 sigma of rT
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        total += static_cast<double>(thinned_poisson_times([&](double) { return r; }, T, r, seed).size());
    }
    CHECK(std::abs(total / 100.0 - r * T) <= 3 * std::sqrt(r * T / 100.0));
}

TEST_CASE("thinning sampler: trivial and invalid rates") {
    CHECK(thinned_poisson_times([](double) { return 0.0; }, 5.0, 0.0, 1).empty());
    const auto half = thinned_poisson_times([](double t) { return t < 1.0 ? 1e3 : 0.0; }, 2.0, 1e3, 4);
    CHECK_FALSE(half.empty());
    CHECK(std::all_of(half.begin(), half.end(), [](double t) { return t < 1.0; }));
    CHECK_THROWS_AS(thinned_poisson_times([](double) { return 20.0; }, 10.0, 10.0, 1), DomainError);
}

TEST_CASE("zero rates give empty streams") {
    auto m = short_model();
    m.pair_rate_single = 0.0;
    m.detector.dark_rate = 0.0;
    const auto r = simulate_scan(m, 1);
    CHECK(r.signal.empty());
    CHECK(r.idler.empty());
    CHECK(r.truth.expected_coincidences.size() == 100);
}

TEST_CASE("same seed, same streams") {
    auto m = short_model();
    m.turbulence.sigma_angle = 1e-3;
    m.turbulence.sigma_phase = 0.1;
    const auto a = simulate_scan(m, 7);
    const auto b = simulate_scan(m, 7);
    const auto c = simulate_scan(m, 8);
    CHECK(a.signal == b.signal);
    CHECK(a.idler == b.idler);
    CHECK(a.truth.gain == b.truth.gain);
    CHECK(a.signal != c.signal);
}

TEST_CASE("streams are sorted, bounded and carry metadata") {
    const auto m = short_model();
    const auto r = simulate_scan(m, 3);
    CHECK(r.signal.is_sorted());
    CHECK(r.idler.is_sorted());
    CHECK(r.signal.channel == Channel::signal);
    CHECK(r.idler.channel == Channel::idler);
    CHECK(r.signal.metadata.duration == to_ps(7.0));
    CHECK(r.signal.metadata.seed == 3);
    CHECK(r.signal.timestamps.back() <= to_ps(7.0));
}

TEST_CASE("rates and fringe match the model") {
    const auto m = short_model();
    const auto r = simulate_scan(m, 5);
    const double T = m.duration;
    const double eta = 0.0375;

    // 2 R1 for balanced gains, up to the partial seventh fringe
    CHECK(r.truth.mean_pair_rate == doctest::Approx(2 * 2.4e5).epsilon(0.04));
    const double singles = eta * r.truth.mean_pair_rate / 0.5 + 200;
    CHECK(std::abs(r.signal.rate() - singles) < 5 * std::sqrt(singles / T));
    CHECK(std::abs(r.idler.rate() - singles) < 5 * std::sqrt(singles / T));

    coincidence::MatchOptions opt;
    const auto c = coincidence::count_coincidences(r.signal, r.idler, opt);
    const double expected = eta * eta * r.truth.mean_pair_rate + singles * singles * 1.5e-9;
    CHECK(std::abs(c.total / T - expected) < 5 * std::sqrt(expected / T));
    CHECK(std::abs(static_cast<double>(c.total) - static_cast<double>(r.truth.pairs_both_detected)) <
          5 * std::sqrt(expected * T));

    // noiseless expectation: contrast of the generating fringe
    const auto& e = r.truth.expected_coincidences;
    const double hi = *std::max_element(e.begin(), e.end());
    const double lo = *std::min_element(e.begin(), e.end());
    CHECK((hi - lo) / (hi + lo) == doctest::Approx(0.97).epsilon(0.01));
    CHECK(hi > 50.0);
    CHECK(hi < 200.0);

    // 7 s at 1.126 s per fringe
    CHECK(r.truth.fringe_max_times.size() >= 6);
    CHECK(r.truth.fringe_max_times.size() <= 7);
}

TEST_CASE("turbulence lowers the gain of the second source") {
    auto m = short_model();
    m.turbulence.sigma_angle = 5e-3;
    m.turbulence.correlation_time = 0.5;
    const auto r = simulate_scan(m, 2);
    CHECK(*std::max_element(r.truth.gain.begin(), r.truth.gain.end()) <= m.base_gain);
    CHECK(*std::min_element(r.truth.gain.begin(), r.truth.gain.end()) < m.base_gain);
}

TEST_CASE("resource cap and validation") {
    auto m = short_model();
    m.max_tags = 1000;
    CHECK_THROWS_AS(simulate_scan(m, 1), ResourceLimitError);
    m = short_model();
    m.base_gain = -0.1;
    CHECK_THROWS_AS(simulate_scan(m, 1), ValidationError);
    m = short_model();
    m.detector.integration_time = 10.0;
    CHECK_THROWS_AS(simulate_scan(m, 1), ValidationError);
}
