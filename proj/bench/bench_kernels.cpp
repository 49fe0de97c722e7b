// Serial references against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pathid/coincidence.hpp"
#include "pathid/fringe_analysis.hpp"
#include "pathid/pipeline.hpp"
#include "pathid/scenario.hpp"

using namespace pathid;

namespace {

TimeTagStream poisson_stream(Channel ch, double rate, double duration, std::uint64_t seed) {
    TimeTagStream out;
    out.channel = ch;
    out.metadata.duration = to_ps(duration);
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> gap(rate);
    for (double t = gap(rng); t < duration; t += gap(rng)) out.timestamps.push_back(to_ps(t));
    return out;
}

const TimeTagStream& signal_stream() {
    static const auto s = poisson_stream(Channel::signal, 9e4, 20.0, 1);
    return s;
}

const TimeTagStream& idler_stream() {
    static const auto s = poisson_stream(Channel::idler, 9e4, 20.0, 2);
    return s;
}

void BM_coincidences_serial(benchmark::State& state) {
    const coincidence::MatchOptions opt;
    for (auto _ : state) {
        benchmark::DoNotOptimize(coincidence::count_coincidences(signal_stream(), idler_stream(), opt).total);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(signal_stream().size() + idler_stream().size()));
}

void BM_coincidences_parallel(benchmark::State& state) {
    const coincidence::MatchOptions opt;
    for (auto _ : state) {
        benchmark::DoNotOptimize(coincidence::count_coincidences_parallel(signal_stream(), idler_stream(), opt).total);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(signal_stream().size() + idler_stream().size()));
}

const std::vector<double> maxima(62, 100.0), minima(62, 2.0);

void BM_monte_carlo_serial(benchmark::State& state) {
    const analysis::MonteCarloOptions opt{static_cast<std::size_t>(state.range(0)), 1};
    for (auto _ : state) benchmark::DoNotOptimize(analysis::monte_carlo_visibility_serial(maxima, minima, opt).std);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_monte_carlo_parallel(benchmark::State& state) {
    const analysis::MonteCarloOptions opt{static_cast<std::size_t>(state.range(0)), 1};
    for (auto _ : state) benchmark::DoNotOptimize(analysis::monte_carlo_visibility(maxima, minima, opt).std);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

const scenario::Scenario& short_scenario() {
    static const auto s = scenario::parse_scenario("base: paper_2m\nscan:\n  duration: 7 s\n");
    return s;
}

void BM_ensemble_serial(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(pipeline::run_ensemble_serial(short_scenario(), 1, 4).mean_visibility);
    }
}

void BM_ensemble_parallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(pipeline::run_ensemble(short_scenario(), 1, 4).mean_visibility);
}

}  // namespace

BENCHMARK(BM_coincidences_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_coincidences_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_monte_carlo_serial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_monte_carlo_parallel)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
