#include <cmath>
#include <numeric>
#include <random>

#include <doctest.h>

#include "pathid/error.hpp"
#include "pathid/turbulence.hpp"

using namespace pathid;
using namespace pathid::turbulence;

TEST_CASE("coupling efficiency") {
    CHECK(coupling_efficiency(0.0, 2e-3) == 1.0);
    CHECK(coupling_efficiency(2e-3, 2e-3) == doctest::Approx(std::exp(-1.0)));
    CHECK(coupling_efficiency(6e-3, 2e-3) == doctest::Approx(1.234e-4).epsilon(1e-3));
    CHECK_THROWS_AS(coupling_efficiency(0.0, 0.0), DomainError);
}

TEST_CASE("quiet model gives a constant series") {
    const TurbulenceModel m{0.0, 1e-3, 0.0, 0.1, 20.0};
    const auto s = sample_gain_series(m, 0.01, 500, 0.07, 3);
    for (std::size_t k = 0; k < s.gain.size(); ++k) {
        CHECK(s.gain[k] == 0.01);
        CHECK(s.phase_offset[k] == 0.0);
    }
}

TEST_CASE("series are reproducible per seed") {
    const TurbulenceModel m{1e-3, 2e-3, 0.2, 0.3, 20.0};
    const auto a = sample_gain_series(m, 0.01, 1000, 0.07, 42);
    const auto b = sample_gain_series(m, 0.01, 1000, 0.07, 42);
    const auto c = sample_gain_series(m, 0.01, 1000, 0.07, 43);
    CHECK(a.gain == b.gain);
    CHECK(a.phase_offset == b.phase_offset);
    CHECK(a.gain != c.gain);
}

TEST_CASE("mean coupling matches a direct Monte-Carlo average") {
    const double theta0 = 2e-3;
    for (const double sigma : {0.5 * theta0, theta0, 2 * theta0}) {
        // short correlation time: nearly independent bins
        const TurbulenceModel m{sigma, theta0, 0.0, 1e-3, 70.0};
        const std::size_t n = 200'000;
        const auto s = sample_gain_series(m, 1.0, n, 0.07, 11);
        double series_mean = 0.0;
        for (const double g : s.gain) series_mean += g * g;
        series_mean /= n;

        std::mt19937_64 rng(5);
        std::normal_distribution<double> theta(0.0, sigma);
        double direct = 0.0;
        for (std::size_t i = 0; i < n; ++i) direct += coupling_efficiency(theta(rng), theta0);
        direct /= n;

        const double closed = 1.0 / std::sqrt(1.0 + 2.0 * sigma * sigma / (theta0 * theta0));
        CHECK(direct == doctest::Approx(closed).epsilon(0.01));
        CHECK(series_mean == doctest::Approx(closed).epsilon(0.01));
    }
}

TEST_CASE("phase offset has the requested stationary spread") {
    const TurbulenceModel m{0.0, 1e-3, 0.3, 0.2, 2.0};
    const auto s = sample_gain_series(m, 0.01, 100'000, 0.07, 9);
    const double mean = std::accumulate(s.phase_offset.begin(), s.phase_offset.end(), 0.0) / s.phase_offset.size();
    double var = 0.0;
    for (const double p : s.phase_offset) var += (p - mean) * (p - mean);
    var /= s.phase_offset.size();
    CHECK(std::sqrt(var) == doctest::Approx(0.3).epsilon(0.03));
}

TEST_CASE("distance calibration") {
    const DistanceCalibration cal({{20.0, 2e-3}, {2.0, 1e-3}, {70.0, 4e-3}});
    CHECK(sigma_from_distance(20.0, cal) == 2e-3);
    CHECK(sigma_from_distance(11.0, cal) == doctest::Approx(1.5e-3));
    CHECK(sigma_from_distance(45.0, cal) == doctest::Approx(3e-3));
    CHECK(sigma_from_distance(0.0, cal) == 1e-3);
    CHECK(sigma_from_distance(500.0, cal) == 4e-3);
    CHECK_THROWS_AS(sigma_from_distance(5.0, DistanceCalibration{}), DomainError);
    CHECK_THROWS_AS(DistanceCalibration({{-1.0, 1e-3}}), ValidationError);
}

TEST_CASE("model validation") {
    TurbulenceModel m;
    m.sigma_angle = -1;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m = {};
    m.correlation_time = 0.0;
    CHECK_THROWS_AS(m.validate(), ValidationError);
}
