#include "chainbell/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <thread>

#include "chainbell/rng.hpp"

namespace chainbell {

namespace {

constexpr std::uint64_t kUniformStream = 0;   // chained pairs use streams 1..2n
constexpr std::uint64_t kSweepStream = 0x73776565;  // per-row seed derivation

double trial_spacing(int n, double time_unit) { return 10.0 * (2.0 * n) * time_unit; }

void validate_common(int n, std::uint64_t trials_per_pair, double delta_t) {
    SettingsCount check(n);
    (void)check;
    if (trials_per_pair < 1) {
        throw std::domain_error("trials_per_pair must be >= 1");
    }
    if (!(delta_t > 0.0)) {
        throw std::domain_error("delta_t must be positive");
    }
}

std::string percent_string(double fraction) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f%%", 100.0 * fraction);
    return buffer;
}

/// Run fn(block_index) for block_index in [0, blocks), sharded over workers.
/// Blocks must not share mutable state.
void parallel_blocks(std::size_t blocks, unsigned workers, const auto& fn) {
    if (blocks == 0) return;
    const unsigned used = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));
    if (used == 1) {
        for (std::size_t b = 0; b < blocks; ++b) fn(b);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (unsigned w = 0; w < used; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t b = w; b < blocks; b += used) fn(b);
        });
    }
    for (std::thread& t : pool) t.join();
}

std::vector<DetectionEvent> generate_lhv_events(const GeneratorConfig& config) {
    const SettingsCount n(config.n);
    const ModelParams params(n, config.p, config.thinning_q, config.delta_t);
    const auto pairs = chained_pairs(n);
    const double spacing = trial_spacing(config.n, params.time_unit);
    const unsigned workers = worker_count();

    if (config.sampling == SamplingMode::ChainedOnly) {
        const std::uint64_t per_pair = config.trials_per_pair;
        std::vector<DetectionEvent> events(2 * pairs.size() * per_pair);
        parallel_blocks(pairs.size(), workers, [&](std::size_t block) {
            const ChainedPair& pair = pairs[block];
            for (std::uint64_t t = 0; t < per_pair; ++t) {
                const std::uint64_t global = block * per_pair + t;
                KeyedRng rng(config.seed, static_cast<std::uint64_t>(pair.index), t);
                auto [alice, bob] =
                    simulate_trial(pair, params, rng, global, static_cast<double>(global) * spacing);
                events[2 * global] = alice;
                events[2 * global + 1] = bob;
            }
        });
        return events;
    }

    // Uniform-settings sampling: both settings drawn independently each trial.
    const std::uint64_t total =
        config.trials_per_pair * static_cast<std::uint64_t>(config.n) * config.n;
    std::vector<DetectionEvent> events(2 * total);
    const std::size_t shard_size = 4096;
    const std::size_t shards = (total + shard_size - 1) / shard_size;
    parallel_blocks(shards, workers, [&](std::size_t shard) {
        const std::uint64_t begin = shard * shard_size;
        const std::uint64_t end = std::min<std::uint64_t>(total, begin + shard_size);
        for (std::uint64_t g = begin; g < end; ++g) {
            KeyedRng rng(config.seed, kUniformStream, g);
            const int a_setting = 1 + std::min(config.n - 1, static_cast<int>(rng.next_unit() * config.n));
            const int b_setting = 1 + std::min(config.n - 1, static_cast<int>(rng.next_unit() * config.n));
            const HiddenVariable hv{2.0 * std::numbers::pi * rng.next_unit(), rng.next_unit(),
                                    rng.next_unit()};
            const double base = static_cast<double>(g) * spacing;
            events[2 * g] = {g, Side::Alice, a_setting,
                             outcome(Side::Alice, a_setting, hv.theta, params),
                             base + emission_time(Side::Alice, a_setting, hv, params)};
            events[2 * g + 1] = {g, Side::Bob, b_setting,
                                 outcome(Side::Bob, b_setting, hv.theta, params),
                                 base + emission_time(Side::Bob, b_setting, hv, params)};
        }
    });
    return events;
}

std::vector<DetectionEvent> generate_quantum_events(const GeneratorConfig& config) {
    const SettingsCount n(config.n);
    const auto pairs = chained_pairs(n);
    const double spacing = trial_spacing(config.n, 1.0);
    const double correlation = std::cos(std::numbers::pi / (2.0 * config.n));
    const std::uint64_t per_pair = config.trials_per_pair;
    const unsigned workers = worker_count();

    std::vector<DetectionEvent> events(2 * pairs.size() * per_pair);
    parallel_blocks(pairs.size(), workers, [&](std::size_t block) {
        const ChainedPair& pair = pairs[block];
        const double plus_prob = (1.0 + pair.sign * correlation) / 2.0;
        for (std::uint64_t t = 0; t < per_pair; ++t) {
            const std::uint64_t global = block * per_pair + t;
            KeyedRng rng(config.seed, static_cast<std::uint64_t>(pair.index), t);
            const int product = rng.next_unit() < plus_prob ? +1 : -1;
            const int alice_outcome = rng.next_unit() < 0.5 ? +1 : -1;
            const double base = static_cast<double>(global) * spacing;
            events[2 * global] = {global, Side::Alice, pair.alice_setting, alice_outcome, base};
            events[2 * global + 1] = {global, Side::Bob, pair.bob_setting,
                                      alice_outcome * product, base};
        }
    });
    return events;
}

}  // namespace

unsigned worker_count() {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap_text = std::getenv("CHAINED_BELL_THREADS")) {
        const long cap = std::strtol(cap_text, nullptr, 10);
        if (cap >= 1) {
            workers = std::min<unsigned>(workers, static_cast<unsigned>(cap));
        }
    }
    return workers;
}

namespace {

// Targets quoted at printed precision (six decimals or fewer) can land just
// past the computed critical value; snap those to the boundary instead of
// rejecting them. The window is far below anything a finite run could
// distinguish.
double checked_against_critical(SettingsCount n, double gamma) {
    const double critical = gamma_crit(n);
    if (gamma > critical) {
        if (gamma <= critical * (1.0 + 1e-6)) {
            return critical;
        }
        throw ValidationError("gamma " + std::to_string(gamma) +
                              " exceeds gamma_crit = " + percent_string(critical) + " for n = " +
                              std::to_string(n.value()) +
                              "; the model cannot fake a violation above critical");
    }
    return gamma;
}

}  // namespace

ResolvedModel resolve_gamma_target(SettingsCount n, double gamma) {
    gamma = checked_against_critical(n, CoincidenceProbability(gamma).value());
    const double two_n = 2.0 * n.value();
    const double natural_floor = (two_n - 1.0) / two_n;
    if (gamma >= natural_floor) {
        return {p_from_gamma(n, CoincidenceProbability(gamma)), 0.0};
    }
    return {0.0, 1.0 - gamma / natural_floor};
}

ResolvedModel resolve_gamma_critical_fake(SettingsCount n, double gamma) {
    gamma = checked_against_critical(n, CoincidenceProbability(gamma).value());
    return {p_crit(n), std::max(0.0, 1.0 - gamma / gamma_crit(n))};
}

std::vector<DetectionEvent> generate_events(const GeneratorConfig& config) {
    validate_common(config.n, config.trials_per_pair, config.delta_t);
    if (config.source == SourceKind::Quantum) {
        return generate_quantum_events(config);
    }
    return generate_lhv_events(config);
}

ExperimentReport analyze(const AnalysisConfig& config, std::span<const DetectionEvent> events) {
    const SettingsCount n(config.n);
    if (!(config.delta_t > 0.0)) {
        throw std::domain_error("delta_t must be positive");
    }
    const auto pairs = chained_pairs(n);

    // Trial reassembly drives the per-pair denominators in both modes.
    const TrialMatchResult trials = match_trial_synchronized(events, config.delta_t);

    ExperimentReport report;
    report.analysis = config;
    report.incomplete_trials = trials.incomplete_trials;

    std::vector<std::uint64_t> denominators(pairs.size(), 0);
    for (const TrialRecord& trial : trials.trials) {
        if (const auto index = pair_index_of(n, trial.alice_setting, trial.bob_setting)) {
            ++denominators[*index];
        } else {
            ++report.non_chained_trials;
        }
    }

    std::vector<CoincidentMatch> matches;
    if (config.mode == MatchMode::TrialSynchronized) {
        for (const TrialRecord& trial : trials.trials) {
            if (trial.coincident) {
                matches.push_back(
                    {trial.alice_setting, trial.bob_setting, trial.alice_outcome, trial.bob_outcome});
            }
        }
    } else {
        std::vector<DetectionEvent> alice;
        std::vector<DetectionEvent> bob;
        for (const DetectionEvent& event : events) {
            (event.side == Side::Alice ? alice : bob).push_back(event);
        }
        auto by_time = [](const DetectionEvent& a, const DetectionEvent& b) {
            return a.timestamp < b.timestamp;
        };
        std::stable_sort(alice.begin(), alice.end(), by_time);
        std::stable_sort(bob.begin(), bob.end(), by_time);
        const StreamMatchResult stream = match_stream_windowed(alice, bob, config.delta_t);
        matches.reserve(stream.matches.size());
        for (const StreamMatch& match : stream.matches) {
            const DetectionEvent& a = alice[match.alice_index];
            const DetectionEvent& b = bob[match.bob_index];
            matches.push_back({a.setting, b.setting, a.outcome, b.outcome});
        }
    }

    AccumulatedStats accumulated = accumulate_stats(n, matches, denominators);
    report.per_pair = std::move(accumulated.per_pair);
    report.non_chained_matches = accumulated.non_chained_matches;

    report.bounds.local = local_bound(n);
    report.bounds.quantum = quantum_value(n);
    report.bounds.gamma_critical = gamma_crit(n);
    report.bounds.eta_critical = eta_crit(n);
    report.bounds.p_critical = p_crit(n);

    const bool any_empty_pair = std::any_of(report.per_pair.begin(), report.per_pair.end(),
                                            [](const PairStats& s) { return s.trials == 0; });
    if (any_empty_pair) {
        report.error = "some chained pair has zero trials; estimates undefined";
        return report;
    }

    report.gamma_hat = gamma_estimator(report.per_pair);
    if (*report.gamma_hat > 0.0) {
        report.bounds.bound_at_gamma_hat =
            coincidence_bound(n, CoincidenceProbability(*report.gamma_hat));
    }

    try {
        const SEstimate estimate = s_estimator(report.per_pair, n);
        report.has_estimate = true;
        report.s_hat = estimate.value;
        report.s_se = estimate.std_err;
    } catch (const std::runtime_error& error) {
        report.error = error.what();
        return report;
    }

    report.verdicts.exceeds_local = report.s_hat > report.bounds.local;
    report.verdicts.exceeds_coincidence_bound =
        report.bounds.bound_at_gamma_hat.has_value() &&
        report.s_hat > report.bounds.bound_at_gamma_hat->clamped;
    report.verdicts.loophole_free =
        report.verdicts.exceeds_local && *report.gamma_hat > report.bounds.gamma_critical;
    return report;
}

ExperimentReport run(const GeneratorConfig& config) {
    const std::vector<DetectionEvent> events = generate_events(config);
    ExperimentReport report =
        analyze(AnalysisConfig{config.n, config.delta_t, config.mode}, events);
    report.generator = config;
    return report;
}

SweepRow sweep_row(SettingsCount n, double gamma, std::uint64_t trials_per_pair,
                   std::uint64_t seed, std::uint64_t row_index, double delta_t, MatchMode mode) {
    const ResolvedModel model = resolve_gamma_critical_fake(n, gamma);
    GeneratorConfig config;
    config.n = n.value();
    config.p = model.p;
    config.thinning_q = model.thinning_q;
    config.requested_gamma = gamma;
    config.trials_per_pair = trials_per_pair;
    config.seed = KeyedRng::derive_key(seed, kSweepStream, row_index);
    config.delta_t = delta_t;
    config.mode = mode;

    const ExperimentReport report = run(config);
    if (!report.has_estimate) {
        throw ValidationError("sweep row at gamma " + std::to_string(gamma) + " failed: " +
                              report.error);
    }
    return {gamma,
            report.s_hat,
            report.s_se,
            report.gamma_hat.value_or(0.0),
            coincidence_bound(n, CoincidenceProbability(gamma)).clamped,
            quantum_value(n)};
}

std::vector<SweepRow> sweep(SettingsCount n, std::span<const double> gamma_grid,
                            std::uint64_t trials_per_pair, std::uint64_t seed, double delta_t,
                            MatchMode mode) {
    for (double gamma : gamma_grid) {
        resolve_gamma_critical_fake(n, gamma);  // validate the whole grid upfront
    }
    std::vector<SweepRow> rows;
    rows.reserve(gamma_grid.size());
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
        rows.push_back(sweep_row(n, gamma_grid[i], trials_per_pair, seed, i, delta_t, mode));
    }
    return rows;
}

ExperimentReport quantum_reference(SettingsCount n, std::uint64_t trials_per_pair,
                                   std::uint64_t seed) {
    GeneratorConfig config;
    config.n = n.value();
    config.p = 0.0;
    config.thinning_q = 0.0;
    config.trials_per_pair = trials_per_pair;
    config.seed = seed;
    config.source = SourceKind::Quantum;
    return run(config);
}

}  // namespace chainbell
