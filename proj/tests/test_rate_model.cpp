#include <cmath>
#include <numbers>

#include <doctest.h>

#include "pathid/error.hpp"
#include "pathid/rate_model.hpp"

using namespace pathid;
using namespace pathid::rates;

constexpr double kPi = std::numbers::pi;

TEST_CASE("coincidence rate fringe") {
    RateParams p;
    p.amp_sq = 2.0;
    p.pump_intensity = 1500.0;
    p.k_pump = 2 * kPi / 405.5e-9;
    p.delta_Phi = kPi;
    CHECK(coincidence_rate(p) == doctest::Approx(0.0).epsilon(1e-12));
    p.delta_Phi = 0.0;
    CHECK(coincidence_rate(p) == doctest::Approx(2 * p.mean_rate()));

    p.vis_contrast = 0.92;
    const double hi = coincidence_rate(p);
    p.delta_Phi = kPi;
    const double lo = coincidence_rate(p);
    CHECK((hi - lo) / (hi + lo) == doctest::Approx(0.92));

    p.vis_contrast = 1.2;
    CHECK_THROWS_AS(coincidence_rate(p), DomainError);
}

TEST_CASE("fringe period in stage travel") {
    CHECK(fringe_period_in_stage_travel(405.5e-9, 2) == doctest::Approx(202.75e-9));
    CHECK(fringe_period_in_stage_travel(405.5e-9, 2) / 180e-9 == doctest::Approx(1.126).epsilon(1e-3));
    CHECK(70.0 / (fringe_period_in_stage_travel(405.5e-9, 2) / 180e-9) == doctest::Approx(62.1).epsilon(0.01));
    CHECK(fringe_period_in_stage_travel(405.5e-9, 1) == doctest::Approx(405.5e-9));
    CHECK(fringe_period_in_stage_travel(810e-9, 2) == doctest::Approx(405e-9));
    CHECK_THROWS_AS(fringe_period_in_stage_travel(405e-9, 0.5), DomainError);
}

TEST_CASE("accidentals and brightness") {
    CHECK(accidental_rate(1.8e4, 1.8e4, 1.5e-9) == doctest::Approx(0.486));
    CHECK(accidental_rate(1.8e4, 1.8e4, 1.5e-9) * 70e-3 == doctest::Approx(0.034).epsilon(0.01));
    CHECK(accidental_rate(0, 5e4, 1.5e-9) == 0.0);
    CHECK(accidental_rate(1e4, 1e4, 1.5e-9) == doctest::Approx(0.15));
    CHECK(brightness(1.8e4, 1.8e4, 675) == 4.8e5);
    CHECK(brightness(1e4, 1e4, 1e3) == 1e5);
    CHECK_THROWS_AS(brightness(1e4, 1e4, 0), DomainError);
}

TEST_CASE("singles rate") {
    CHECK(singles_rate(0, 0.05, 0.5, 200, 0.3, 0.2) == 200.0);
    // no background, no dark counts, full contrast: proportional to the pair fringe
    for (const double phi : {0.0, 1.0, 2.5}) {
        CHECK(singles_rate(1e4, 0.1, 0, 0, phi, 1.0) == doctest::Approx(1e3 * (1 + std::cos(phi))));
    }
    // background chosen from the measured idler contrast at 2 m reproduces it
    const double bf = background_fraction_for_visibility(0.9615, 0.1990);
    const double hi = singles_rate(2.4e5, 0.0375, bf, 0, 0, 0.9615 * (1 - bf));
    const double lo = singles_rate(2.4e5, 0.0375, bf, 0, kPi, 0.9615 * (1 - bf));
    CHECK((hi - lo) / (hi + lo) == doctest::Approx(0.1990));
    CHECK_THROWS_AS(singles_rate(1e4, 1.5, 0, 0, 0, 0), DomainError);
}

TEST_CASE("detector parameters") {
    DetectorParams d;
    CHECK_NOTHROW(d.validate());
    d.singles_background_fraction = 1.0;
    CHECK_THROWS_AS(d.validate(), ValidationError);
    d = {};
    d.coincidence_window = 0.0;
    CHECK_THROWS_AS(d.validate(), ValidationError);
}
