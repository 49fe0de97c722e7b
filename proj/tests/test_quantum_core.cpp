#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "pathid/diagnostics.hpp"
#include "pathid/error.hpp"
#include "pathid/quantum_core.hpp"

using namespace pathid;
using namespace pathid::quantum;

constexpr double kPi = std::numbers::pi;

// Contrast of emission_probability found by scanning phi densely.
static double scanned_visibility(double g1, double g2, int n = 20000) {
    double hi = -1.0, lo = 1e300;
    for (int k = 0; k < n; ++k) {
        const double p = emission_probability(g1, g2, 2.0 * kPi * k / n);
        hi = std::max(hi, p);
        lo = std::min(lo, p);
    }
    return (hi - lo) / (hi + lo);
}

TEST_CASE("pair amplitude: constructive, destructive and single-source") {
    const double g = 0.01;
    const auto a = superposed_pair_amplitude(g, g, 0.0);
    CHECK(a.real() == doctest::Approx(2 * g));
    CHECK(a.imag() == doctest::Approx(0.0));
    CHECK(std::norm(a) == doctest::Approx(4 * g * g));
    CHECK(std::abs(superposed_pair_amplitude(g, g, kPi)) < 1e-15);
    CHECK(std::abs(superposed_pair_amplitude(g, 0.0, 1.234)) == doctest::Approx(g));
    CHECK_THROWS_AS(superposed_pair_amplitude(-0.1, g, 0.0), DomainError);
    CHECK_THROWS_AS(superposed_pair_amplitude(g, -0.1, 0.0), DomainError);
}

TEST_CASE("emission probability closed form") {
    CHECK(emission_probability(1, 1, 0) == doctest::Approx(4.0));
    CHECK(emission_probability(1, 1, kPi / 2) == doctest::Approx(2.0));
    CHECK(emission_probability(1, 0.5, kPi) == doctest::Approx(0.25));
    // factor-four enhancement over one crystal, and exact zero
    const double g = 0.03;
    CHECK(emission_probability(g, g, 0) / emission_probability(g, 0, 0) == doctest::Approx(4.0));
    CHECK(emission_probability(g, g, kPi) == 0.0);
}

TEST_CASE("visibility from amplitudes") {
    CHECK(fringe_visibility_from_amplitudes(0.2, 0.2) == doctest::Approx(1.0));
    CHECK(fringe_visibility_from_amplitudes(0.2, 0.0) == 0.0);
    CHECK(fringe_visibility_from_amplitudes(1.0, 0.5) == doctest::Approx(0.8));
    CHECK(scanned_visibility(1.0, 0.5) == doctest::Approx(0.8).epsilon(1e-9));
    CHECK_THROWS_AS(fringe_visibility_from_amplitudes(0.0, 0.0), DegenerateInputError);
}

TEST_CASE("visibility from amplitudes matches a phase scan on random gains") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(1e-3, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double g1 = u(rng), g2 = u(rng);
        // the scan grid contains 0 and pi exactly, where the extremes sit
        CHECK(std::abs(fringe_visibility_from_amplitudes(g1, g2) - scanned_visibility(g1, g2, 2000)) < 1e-10);
    }
}

TEST_CASE("truncated state") {
    const auto vac = truncated_state(0, 0, 0, true);
    CHECK(vac.amp_vac == Complex(1.0, 0.0));
    CHECK(vac.amp_pair == Complex(0.0, 0.0));

    const auto raw = truncated_state(0.1, 0.1, 0, false, false);
    CHECK(raw.amp_pair.real() == doctest::Approx(0.2));
    const auto with_double = truncated_state(0.1, 0.1, 0, true, false);
    CHECK(std::abs(with_double.amp_double) == doctest::Approx(0.02));

    const auto dark = truncated_state(0.1, 0.1, kPi, true, false);
    CHECK(std::abs(dark.amp_pair) < 1e-15);
    CHECK(std::abs(dark.amp_double) < 1e-15);

    const auto n = truncated_state(0.1, 0.05, 0.3, true);
    CHECK(n.norm_squared() == doctest::Approx(1.0));
}

TEST_CASE("phase reduction and high-gain warning") {
    CHECK(reduce_phase(-kPi / 2) == doctest::Approx(1.5 * kPi));
    CHECK(reduce_phase(5 * kPi) == doctest::Approx(kPi));

    std::vector<std::string> seen;
    diag::ScopedWarningSink sink([&](std::string_view m) { seen.emplace_back(m); });
    const SpdcProcess low(0.01, 7.0, 405.5e-9, 1e-3);
    CHECK(seen.empty());
    CHECK(low.phase() == doctest::Approx(7.0 - 2 * kPi));
    const SpdcProcess high(0.5, 0.0, 405.5e-9, 1e-3);
    CHECK(seen.size() == 1);
    CHECK_THROWS_AS(SpdcProcess(-1.0, 0.0, 405.5e-9, 1e-3), DomainError);
}
