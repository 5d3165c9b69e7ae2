#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "chainbell/coincidence.hpp"
#include "support/matching_oracle.hpp"

using namespace chainbell;

namespace {

DetectionEvent event(std::uint64_t trial, Side side, int setting, int outcome, double time) {
    return {trial, side, setting, outcome, time};
}

std::vector<DetectionEvent> stream_of(std::initializer_list<double> times, Side side) {
    std::vector<DetectionEvent> events;
    std::uint64_t trial = 0;
    for (double t : times) {
        events.push_back(event(trial++, side, 1, +1, t));
    }
    return events;
}

}  // namespace

TEST_CASE("trial-synchronized verdicts use the strict window") {
    const std::vector<DetectionEvent> events{
        event(0, Side::Alice, 1, +1, 5.0), event(0, Side::Bob, 1, -1, 6.0),   // diff 1.0
        event(1, Side::Alice, 2, +1, 5.0), event(1, Side::Bob, 1, -1, 7.0),   // diff 2.0
        event(2, Side::Alice, 2, -1, 4.0), event(2, Side::Bob, 2, -1, 4.0),   // diff 0
        event(3, Side::Alice, 1, +1, 0.0), event(3, Side::Bob, 2, +1, 1.5),   // exactly delta_t
    };
    const TrialMatchResult result = match_trial_synchronized(events, 1.5);
    REQUIRE(result.trials.size() == 4);
    CHECK(result.trials[0].coincident);
    CHECK_FALSE(result.trials[1].coincident);
    CHECK(result.trials[2].coincident);
    CHECK_FALSE(result.trials[3].coincident);  // strict comparison
    CHECK(result.incomplete_trials == 0);
}

TEST_CASE("trial-synchronized flags incomplete trials and rejects doubled sides") {
    const std::vector<DetectionEvent> incomplete{
        event(0, Side::Alice, 1, +1, 0.0),
        event(1, Side::Alice, 1, +1, 10.0), event(1, Side::Bob, 1, +1, 10.5),
    };
    const TrialMatchResult result = match_trial_synchronized(incomplete, 1.5);
    CHECK(result.trials.size() == 1);
    CHECK(result.incomplete_trials == 1);

    const std::vector<DetectionEvent> doubled{
        event(0, Side::Alice, 1, +1, 0.0),
        event(0, Side::Alice, 2, +1, 0.5),
        event(0, Side::Bob, 1, +1, 0.2),
    };
    CHECK_THROWS_AS(match_trial_synchronized(doubled, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(match_trial_synchronized(incomplete, 0.0), std::domain_error);
}

TEST_CASE("stream matching: single candidate in window") {
    const auto alice = stream_of({1.0}, Side::Alice);
    const auto bob = stream_of({1.4}, Side::Bob);
    const StreamMatchResult result = match_stream_windowed(alice, bob, 1.5);
    REQUIRE(result.matches.size() == 1);
    CHECK(result.matches[0].alice_index == 0);
    CHECK(result.matches[0].bob_index == 0);
    CHECK(result.alice_singles.empty());
    CHECK(result.bob_singles.empty());
}

TEST_CASE("stream matching: outside the window leaves two singles") {
    const auto alice = stream_of({1.0}, Side::Alice);
    const auto bob = stream_of({2.6}, Side::Bob);
    const StreamMatchResult result = match_stream_windowed(alice, bob, 1.5);
    CHECK(result.matches.empty());
    CHECK(result.alice_singles == std::vector<std::size_t>{0});
    CHECK(result.bob_singles == std::vector<std::size_t>{0});
}

TEST_CASE("stream matching prefers the nearest neighbor") {
    // B(1.9) sits nearer to A(2.0) than to A(1.0).
    const auto alice = stream_of({1.0, 2.0}, Side::Alice);
    const auto bob = stream_of({1.9}, Side::Bob);
    const StreamMatchResult result = match_stream_windowed(alice, bob, 1.5);
    REQUIRE(result.matches.size() == 1);
    CHECK(result.matches[0].alice_index == 1);
    CHECK(result.matches[0].bob_index == 0);
    CHECK(result.alice_singles == std::vector<std::size_t>{0});
}

TEST_CASE("stream matching breaks distance ties toward the earlier event") {
    // Alice at 2.0 equidistant from bobs at 1.5 and 2.5: earlier bob wins.
    const auto alice = stream_of({2.0}, Side::Alice);
    const auto bob = stream_of({1.5, 2.5}, Side::Bob);
    const StreamMatchResult result = match_stream_windowed(alice, bob, 1.5);
    REQUIRE(result.matches.size() == 1);
    CHECK(result.matches[0].bob_index == 0);

    // Bob equidistant between two alices: earlier alice wins.
    const auto alice2 = stream_of({1.5, 2.5}, Side::Alice);
    const auto bob2 = stream_of({2.0}, Side::Bob);
    const StreamMatchResult result2 = match_stream_windowed(alice2, bob2, 1.5);
    REQUIRE(result2.matches.size() == 1);
    CHECK(result2.matches[0].alice_index == 0);
}

TEST_CASE("stream matching validates input") {
    const auto sorted = stream_of({1.0, 2.0}, Side::Alice);
    std::vector<DetectionEvent> unsorted = stream_of({2.0, 1.0}, Side::Bob);
    CHECK_THROWS_AS(match_stream_windowed(sorted, unsorted, 1.5), std::invalid_argument);

    const std::vector<DetectionEvent> empty;
    const StreamMatchResult result = match_stream_windowed(empty, empty, 1.5);
    CHECK(result.matches.empty());
    CHECK(result.alice_singles.empty());
    CHECK(result.bob_singles.empty());
}

TEST_CASE("stream matching against the exhaustive oracle") {
    std::mt19937 rng(20250214);
    std::uniform_int_distribution<int> count_dist(0, 20);
    std::uniform_real_distribution<double> time_dist(0.0, 40.0);
    const double delta_t = 1.5;

    int optimal_hits = 0;
    const int instances = 400;
    for (int instance = 0; instance < instances; ++instance) {
        std::vector<double> a_times(count_dist(rng));
        std::vector<double> b_times(count_dist(rng));
        for (double& t : a_times) t = time_dist(rng);
        for (double& t : b_times) t = time_dist(rng);
        std::sort(a_times.begin(), a_times.end());
        std::sort(b_times.begin(), b_times.end());

        std::vector<DetectionEvent> alice, bob;
        for (std::size_t i = 0; i < a_times.size(); ++i)
            alice.push_back(event(i, Side::Alice, 1, +1, a_times[i]));
        for (std::size_t j = 0; j < b_times.size(); ++j)
            bob.push_back(event(j, Side::Bob, 1, +1, b_times[j]));

        const StreamMatchResult matched = match_stream_windowed(alice, bob, delta_t);
        const std::size_t optimal =
            testing::max_cardinality_matching(a_times, b_times, delta_t);

        // Structural invariants: window respected, no double consumption,
        // matches plus singles partition both streams.
        std::vector<char> a_used(alice.size(), 0), b_used(bob.size(), 0);
        for (const StreamMatch& match : matched.matches) {
            CHECK(std::abs(a_times[match.alice_index] - b_times[match.bob_index]) < delta_t);
            CHECK_FALSE(a_used[match.alice_index]);
            CHECK_FALSE(b_used[match.bob_index]);
            a_used[match.alice_index] = 1;
            b_used[match.bob_index] = 1;
        }
        for (std::size_t i : matched.alice_singles) {
            CHECK_FALSE(a_used[i]);
            a_used[i] = 1;
        }
        for (std::size_t j : matched.bob_singles) {
            CHECK_FALSE(b_used[j]);
            b_used[j] = 1;
        }
        CHECK(std::count(a_used.begin(), a_used.end(), 1) == static_cast<long>(alice.size()));
        CHECK(std::count(b_used.begin(), b_used.end(), 1) == static_cast<long>(bob.size()));

        CHECK(matched.matches.size() <= optimal);
        if (matched.matches.size() == optimal) ++optimal_hits;
    }
    // Measured property, not a theorem; the acceptance suite runs the full
    // 1000-instance version of this check.
    CHECK(optimal_hits >= instances * 99 / 100);

    // Quantized timestamps force ties within and across the streams.
    for (int instance = 0; instance < 200; ++instance) {
        std::vector<double> a_times(count_dist(rng));
        std::vector<double> b_times(count_dist(rng));
        for (double& t : a_times) t = std::floor(time_dist(rng) * 2.0) / 2.0;
        for (double& t : b_times) t = std::floor(time_dist(rng) * 2.0) / 2.0;
        std::sort(a_times.begin(), a_times.end());
        std::sort(b_times.begin(), b_times.end());
        std::vector<DetectionEvent> alice, bob;
        for (std::size_t i = 0; i < a_times.size(); ++i)
            alice.push_back(event(i, Side::Alice, 1, +1, a_times[i]));
        for (std::size_t j = 0; j < b_times.size(); ++j)
            bob.push_back(event(j, Side::Bob, 1, +1, b_times[j]));

        const StreamMatchResult matched = match_stream_windowed(alice, bob, delta_t);
        const std::size_t optimal =
            testing::max_cardinality_matching(a_times, b_times, delta_t);
        CHECK(matched.matches.size() <= optimal);
        for (const StreamMatch& match : matched.matches) {
            CHECK(std::abs(a_times[match.alice_index] - b_times[match.bob_index]) < delta_t);
        }
        CHECK(matched.matches.size() + matched.alice_singles.size() == alice.size());
        CHECK(matched.matches.size() + matched.bob_singles.size() == bob.size());
    }
}

TEST_CASE("the exhaustive oracle itself on known instances") {
    const std::vector<double> single_a{0.0, 1.0};
    const std::vector<double> single_b{0.5};
    CHECK(testing::max_cardinality_matching(single_a, single_b, 1.5) == 1);

    // Crossing assignment required for full cardinality.
    const std::vector<double> cross_a{0.0, 1.5};
    const std::vector<double> cross_b{-1.4, 0.1};
    CHECK(testing::max_cardinality_matching(cross_a, cross_b, 1.5) == 2);

    const std::vector<double> late_a{1.0, 2.0};
    const std::vector<double> late_b{1.9};
    CHECK(testing::max_cardinality_matching(late_a, late_b, 1.5) == 1);

    CHECK(testing::max_cardinality_matching({}, single_b, 1.5) == 0);
}

TEST_CASE("stream matching is deterministic on repeated calls") {
    const auto alice = stream_of({1.0, 1.0, 2.2, 3.1}, Side::Alice);
    const auto bob = stream_of({0.9, 1.0, 2.9}, Side::Bob);
    const StreamMatchResult first = match_stream_windowed(alice, bob, 1.5);
    const StreamMatchResult second = match_stream_windowed(alice, bob, 1.5);
    REQUIRE(first.matches.size() == second.matches.size());
    for (std::size_t i = 0; i < first.matches.size(); ++i) {
        CHECK(first.matches[i].alice_index == second.matches[i].alice_index);
        CHECK(first.matches[i].bob_index == second.matches[i].bob_index);
    }
}

TEST_CASE("accumulate_stats tallies per chained pair") {
    const SettingsCount n(2);
    const std::vector<CoincidentMatch> matches{
        {1, 1, +1, +1}, {1, 1, -1, -1},              // pair 1: products +1, +1
        {2, 1, +1, -1}, {2, 1, -1, +1},              // pair 2: products -1, -1
        {2, 2, +1, +1}, {2, 2, +1, -1},              // pair 3: products +1, -1
        {1, 2, +1, +1},                              // pair 4 (closing)
        {2, 3, +1, +1},                              // non-chained, excluded
    };
    const std::vector<std::uint64_t> trials{4, 4, 4, 4};
    const AccumulatedStats stats = accumulate_stats(n, matches, trials);
    CHECK(stats.non_chained_matches == 1);
    REQUIRE(stats.per_pair.size() == 4);
    CHECK(stats.per_pair[0].coincidences == 2);
    CHECK(stats.per_pair[0].cond_corr() == 1.0);
    CHECK(stats.per_pair[1].cond_corr() == -1.0);
    CHECK(stats.per_pair[2].cond_corr() == 0.0);
    CHECK(stats.per_pair[3].coincidences == 1);
    CHECK(stats.per_pair[0].gamma_hat() == 0.5);
    CHECK(stats.per_pair[2].std_err() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("s_estimator reaches the algebraic extremes") {
    auto stats_with = [](SettingsCount n, const std::vector<double>& corr) {
        const auto pairs = chained_pairs(n);
        std::vector<PairStats> stats;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const std::uint64_t k = 1000;
            stats.push_back({pairs[i], k, k, corr[i] * static_cast<double>(k)});
        }
        return stats;
    };

    const SettingsCount n3(3);
    const auto maxed = stats_with(n3, {1, 1, 1, 1, 1, -1});
    CHECK(s_estimator(maxed, n3).value == doctest::Approx(6.0).epsilon(1e-12));

    const auto zeroed = stats_with(n3, {0, 0, 0, 0, 0, 0});
    CHECK(s_estimator(zeroed, n3).value == 0.0);

    const SettingsCount n2(2);
    const double w = std::cos(std::numbers::pi / 4.0);
    const auto critical = stats_with(n2, {w, w, w, -w});
    CHECK(s_estimator(critical, n2).value ==
          doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));

    // Propagated error is the root-sum-square of the per-pair errors.
    double variance = 0.0;
    for (const PairStats& pair_stats : critical) {
        variance += pair_stats.std_err() * pair_stats.std_err();
    }
    CHECK(s_estimator(critical, n2).std_err ==
          doctest::Approx(std::sqrt(variance)).epsilon(1e-12));
}

TEST_CASE("s_estimator refuses zero-coincidence pairs by name") {
    const SettingsCount n(2);
    const auto pairs = chained_pairs(n);
    std::vector<PairStats> stats;
    for (const auto& pair : pairs) {
        stats.push_back({pair, 100, pair.index == 3 ? 0ULL : 80ULL, 10.0});
    }
    CHECK_THROWS_WITH_AS(s_estimator(stats, n), doctest::Contains("pair 3"), std::runtime_error);
}

TEST_CASE("gamma_estimator takes the minimum rate") {
    const SettingsCount n(2);
    const auto pairs = chained_pairs(n);
    std::vector<PairStats> stats;
    for (const auto& pair : pairs) {
        stats.push_back({pair, 100, pair.index == 2 ? 85ULL : 90ULL, 0.0});
    }
    CHECK(gamma_estimator(stats) == doctest::Approx(0.85).epsilon(1e-12));

    stats[1].coincidences = 90;
    CHECK(gamma_estimator(stats) == doctest::Approx(0.9).epsilon(1e-12));

    stats[0].trials = 0;
    CHECK_THROWS_AS(gamma_estimator(stats), std::invalid_argument);
}
