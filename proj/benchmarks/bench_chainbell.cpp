#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "chainbell/coincidence.hpp"
#include "chainbell/experiment.hpp"
#include "chainbell/lhv_model.hpp"

using namespace chainbell;

namespace {

GeneratorConfig config_for(int n, std::uint64_t trials) {
    GeneratorConfig config;
    config.n = n;
    config.p = 0.5;
    config.trials_per_pair = trials;
    config.seed = 1;
    return config;
}

std::pair<std::vector<DetectionEvent>, std::vector<DetectionEvent>> split_sides(
    const std::vector<DetectionEvent>& events) {
    std::vector<DetectionEvent> alice, bob;
    alice.reserve(events.size() / 2);
    bob.reserve(events.size() / 2);
    for (const DetectionEvent& event : events) {
        (event.side == Side::Alice ? alice : bob).push_back(event);
    }
    return {std::move(alice), std::move(bob)};
}

}  // namespace

static void GenerateTrials(benchmark::State& state) {
    const GeneratorConfig config = config_for(3, static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) {
        auto events = generate_events(config);
        benchmark::DoNotOptimize(events);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 6);
}
BENCHMARK(GenerateTrials)->Range(1 << 10, 1 << 16);

static void StreamMatchSpaced(benchmark::State& state) {
    const auto events = generate_events(config_for(3, static_cast<std::uint64_t>(state.range(0))));
    const auto [alice, bob] = split_sides(events);
    for (auto _ : state) {
        auto result = match_stream_windowed(alice, bob, 1.5);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(alice.size()));
}
BENCHMARK(StreamMatchSpaced)->Range(1 << 10, 1 << 16);

static void StreamMatchDense(benchmark::State& state) {
    // Uniform arrival times at one event per two window widths and side.
    const std::size_t count = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> jitter(0.0, 3.0 * static_cast<double>(count));
    std::vector<double> a_times(count), b_times(count);
    for (double& t : a_times) t = jitter(rng);
    for (double& t : b_times) t = jitter(rng);
    std::sort(a_times.begin(), a_times.end());
    std::sort(b_times.begin(), b_times.end());
    std::vector<DetectionEvent> alice(count), bob(count);
    for (std::size_t i = 0; i < count; ++i) {
        alice[i] = {i, Side::Alice, 1, +1, a_times[i]};
        bob[i] = {i, Side::Bob, 1, +1, b_times[i]};
    }
    for (auto _ : state) {
        auto result = match_stream_windowed(alice, bob, 1.5);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(count));
}
BENCHMARK(StreamMatchDense)->Range(1 << 10, 1 << 16);

static void TrialMatch(benchmark::State& state) {
    const auto events = generate_events(config_for(3, static_cast<std::uint64_t>(state.range(0))));
    for (auto _ : state) {
        auto result = match_trial_synchronized(events, 1.5);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(events.size() / 2));
}
BENCHMARK(TrialMatch)->Range(1 << 10, 1 << 14);

static void ExactOracle(benchmark::State& state) {
    const ModelParams params(SettingsCount(static_cast<int>(state.range(0))), 0.4);
    for (auto _ : state) {
        auto stats = exact_all_pair_stats(params);
        benchmark::DoNotOptimize(stats);
    }
}
BENCHMARK(ExactOracle)->DenseRange(2, 6);

static void FullRun(benchmark::State& state) {
    const GeneratorConfig config = config_for(2, static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) {
        auto report = run(config);
        benchmark::DoNotOptimize(report);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * 4);
}
BENCHMARK(FullRun)->Range(1 << 12, 1 << 16);

BENCHMARK_MAIN();
