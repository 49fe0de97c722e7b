#include <algorithm>
#include <random>
#include <sstream>

#include <doctest.h>

#include "oracles.hpp"
#include "pathid/coincidence.hpp"
#include "pathid/error.hpp"
#include "pathid/tag_io.hpp"

using namespace pathid;
using namespace pathid::coincidence;

static TimeTagStream stream(Channel ch, std::vector<Picoseconds> t, Picoseconds duration = 0) {
    TimeTagStream s;
    s.channel = ch;
    s.timestamps = std::move(t);
    s.metadata.duration = duration ? duration : (s.timestamps.empty() ? 1 : s.timestamps.back() + 1);
    return s;
}

static std::vector<Picoseconds> random_times(std::mt19937_64& rng, std::size_t n, Picoseconds span) {
    std::uniform_int_distribution<Picoseconds> u(0, span);
    std::vector<Picoseconds> t(n);
    for (auto& x : t) x = u(rng);
    std::sort(t.begin(), t.end());
    return t;
}

TEST_CASE("trivial instances") {
    const MatchOptions opt;
    CHECK(count_coincidences(stream(Channel::signal, {}), stream(Channel::idler, {}), opt).total == 0);
    CHECK(count_coincidences(stream(Channel::signal, {0}), stream(Channel::idler, {1000}), opt).total == 0);
    // 1.0 ns apart: outside a 1.5 ns total window, inside as a half-width
    MatchOptions half = opt;
    half.span = WindowSpan::half_width;
    CHECK(count_coincidences(stream(Channel::signal, {0}), stream(Channel::idler, {1000}), half).total == 1);
    CHECK(count_coincidences(stream(Channel::signal, {0}), stream(Channel::idler, {750}), opt).total == 1);
    CHECK(count_coincidences(stream(Channel::signal, {0}), stream(Channel::idler, {751}), opt).total == 0);
    MatchOptions odd = opt;
    odd.window = 1501;
    CHECK(count_coincidences(stream(Channel::signal, {0}), stream(Channel::idler, {750}), odd).total == 1);
    CHECK(count_coincidences(stream(Channel::signal, {0}), stream(Channel::idler, {751}), odd).total == 0);
}

TEST_CASE("greedy matcher equals the exhaustive oracle") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t ns = rng() % 60, nd = rng() % 60;
        const Picoseconds span = 1 + rng() % 40'000;
        MatchOptions opt;
        opt.window = 1 + rng() % 3000;
        opt.span = rng() % 2 ? WindowSpan::total_width : WindowSpan::half_width;
        const auto s = stream(Channel::signal, random_times(rng, ns, span));
        const auto d = stream(Channel::idler, random_times(rng, nd, span));
        const auto got = count_coincidences(s, d, opt);
        REQUIRE(got.total == oracle::greedy_count(s.timestamps, d.timestamps, opt.max_delta_half_ps()));
        CHECK(std::is_sorted(got.event_times.begin(), got.event_times.end()));
        // channel exchange
        const auto swapped = count_coincidences(stream(Channel::signal, d.timestamps), stream(Channel::idler, s.timestamps), opt);
        CHECK(swapped.total == got.total);

        opt.mode = MatchMode::all_pairs;
        CHECK(count_coincidences(s, d, opt).total == oracle::all_pairs_count(s.timestamps, d.timestamps, opt.max_delta_half_ps()));
    }
}

TEST_CASE("parallel matcher equals the sequential one") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        MatchOptions opt;
        opt.window = 1500;
        opt.keep_pairs = true;
        opt.mode = trial % 5 == 0 ? MatchMode::all_pairs : MatchMode::greedy;
        const auto s = stream(Channel::signal, random_times(rng, 5000, 2'000'000));
        const auto d = stream(Channel::idler, random_times(rng, 5000, 2'000'000));
        const auto ref = count_coincidences(s, d, opt);
        for (const std::size_t segments : {0u, 1u, 3u, 17u, 200u}) {
            const auto par = count_coincidences_parallel(s, d, opt, segments);
            CHECK(par.total == ref.total);
            CHECK(par.event_times == ref.event_times);
            CHECK(par.matched_pairs == ref.matched_pairs);
        }
    }
}

TEST_CASE("unsorted input is rejected") {
    const MatchOptions opt;
    CHECK_THROWS_AS(count_coincidences(stream(Channel::signal, {10, 5}), stream(Channel::idler, {1, 2}), opt), OrderingError);
    CHECK_THROWS_AS(count_coincidences(stream(Channel::signal, {1}), stream(Channel::idler, {9000, 10, 20}), opt), OrderingError);
    MatchOptions zero;
    zero.window = 0;
    CHECK_THROWS_AS(count_coincidences(stream(Channel::signal, {1}), stream(Channel::idler, {1}), zero), DomainError);
}

TEST_CASE("binning") {
    const auto empty = bin_counts(std::vector<Picoseconds>{}, 70e-3, 70.0);
    CHECK(empty.size() == 1000);
    CHECK(empty.total() == 0.0);

    std::vector<Picoseconds> t;
    for (int b = 0; b < 1000; ++b) t.push_back(to_ps(b * 70e-3) + 1);
    const auto one = bin_counts(t, 70e-3, 70.0);
    CHECK(std::all_of(one.counts.begin(), one.counts.end(), [](double c) { return c == 1.0; }));

    // partial last bin dropped, later events ignored
    const auto partial = bin_counts(std::vector<Picoseconds>{to_ps(0.25), to_ps(0.33)}, 0.1, 0.35);
    CHECK(partial.size() == 3);
    CHECK(partial.total() == 1.0);
}

TEST_CASE("delayed-window accidentals") {
    const MatchOptions opt;
    const auto s = oracle::poisson_stream(Channel::signal, 1.8e4, 20.0, 1);
    auto d = oracle::poisson_stream(Channel::idler, 1.8e4, 20.0, 2);
    // zero offset is the plain coincidence rate
    CHECK(accidental_estimate(s, d, opt, 0) == doctest::Approx(count_coincidences(s, d, opt).total / 20.0));
    const double acc = accidental_estimate(s, d, opt, to_ps(100e-9));
    const double expected = 1.8e4 * 1.8e4 * 1.5e-9;
    CHECK(std::abs(acc - expected) < 3 * std::sqrt(expected / 20.0));
    CHECK(accidental_estimate(s, stream(Channel::idler, {}, s.metadata.duration), opt, 1000) == 0.0);
}

TEST_CASE("tag files round trip") {
    const auto s = stream(Channel::signal, {0, 5, 5, 1'000'000'000'000ull});
    const auto d = stream(Channel::idler, {3, 5, 7});
    std::stringstream bin;
    tagio::write_binary(bin, s, d);
    const auto b = tagio::read_binary(bin);
    CHECK(b.signal.timestamps == s.timestamps);
    CHECK(b.idler.timestamps == d.timestamps);
    CHECK(bin.str().size() == tagio::kHeaderSize + 7 * tagio::kRecordSize);

    std::stringstream csv;
    tagio::write_csv(csv, s, d);
    const auto c = tagio::read_csv(csv);
    CHECK(c.signal.timestamps == s.timestamps);
    CHECK(c.idler.timestamps == d.timestamps);

    std::stringstream bad("PTAG\x07");
    CHECK_THROWS_AS(tagio::read_binary(bad), ParseError);
    std::stringstream bad_csv("channel,timestamp_ps\n2,10\n");
    CHECK_THROWS_AS(tagio::read_csv(bad_csv), ParseError);
}
