#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chainbell/bounds.hpp"
#include "chainbell/chain.hpp"
#include "chainbell/events.hpp"

namespace chainbell {

enum class MatchMode { TrialSynchronized, StreamWindowed };

/// How to decide coincidence: pairing mode plus the window half-width.
/// The window comparison is strict: |t - t'| < delta_t.
struct MatchPolicy {
    MatchMode mode;
    double delta_t;
};

/// One trial reassembled from its two events, with the coincidence verdict.
struct TrialRecord {
    std::uint64_t trial_id;
    int alice_setting;
    int bob_setting;
    int alice_outcome;
    int bob_outcome;
    double alice_time;
    double bob_time;
    bool coincident;
};

struct TrialMatchResult {
    std::vector<TrialRecord> trials;     // ordered by trial_id
    std::uint64_t incomplete_trials{0};  // trials missing one side, excluded
};

/// Pair events that share a trial id and test each trial against the window.
/// Throws on a trial carrying two events for the same side.
TrialMatchResult match_trial_synchronized(std::span<const DetectionEvent> events,
                                          double delta_t);

/// Matched pair of stream positions (indices into the two input spans).
struct StreamMatch {
    std::size_t alice_index;
    std::size_t bob_index;
};

struct StreamMatchResult {
    std::vector<StreamMatch> matches;
    std::vector<std::size_t> alice_singles;
    std::vector<std::size_t> bob_singles;
};

/// Nearest-neighbor pairing of two time-sorted streams.
///
/// The merged stream is cut into clusters at gaps of delta_t or more (no
/// window can bridge such a gap); each cluster is paired non-crossing with as
/// many matches as possible and, among those, the smallest total time
/// distance. Equidistant ties keep the earlier event on either side. Each
/// event is consumed at most once and the output is deterministic. Cost is
/// linear in the stream length plus the product of per-cluster counts, so
/// well-spaced data pairs in linear time. Throws on unsorted input; empty
/// streams are fine.
StreamMatchResult match_stream_windowed(std::span<const DetectionEvent> alice,
                                        std::span<const DetectionEvent> bob,
                                        double delta_t);

/// One coincident detection pair, reduced to what the estimators need.
struct CoincidentMatch {
    int alice_setting;
    int bob_setting;
    int alice_outcome;
    int bob_outcome;
};

/// Per-chained-pair tallies.
struct PairStats {
    ChainedPair pair;
    std::uint64_t trials{0};
    std::uint64_t coincidences{0};
    double corr_sum{0.0};

    double gamma_hat() const {
        return trials == 0 ? 0.0 : static_cast<double>(coincidences) / static_cast<double>(trials);
    }
    bool has_correlation() const { return coincidences > 0; }
    double cond_corr() const { return corr_sum / static_cast<double>(coincidences); }
    double std_err() const;
};

struct AccumulatedStats {
    std::vector<PairStats> per_pair;      // 2n entries in chain order
    std::uint64_t non_chained_matches{0};  // excluded with a warning tally
};

/// Tally coincident matches into per-pair statistics. trials_per_pair gives
/// the 2n denominators (total trials attempted per pair, coincident or not).
AccumulatedStats accumulate_stats(SettingsCount n, std::span<const CoincidentMatch> matches,
                                  std::span<const std::uint64_t> trials_per_pair);

struct SEstimate {
    double value;
    double std_err;  // root-sum-square of the per-term standard errors
};

/// Chained Bell estimate from per-pair conditional correlations: groups
/// (1,2),(3,4),... add, the closing group subtracts. Refuses to total when
/// any pair has zero coincidences, naming the pair.
SEstimate s_estimator(std::span<const PairStats> stats, SettingsCount n);

/// Empirical coincidence probability: the minimum per-pair rate.
double gamma_estimator(std::span<const PairStats> stats);

}  // namespace chainbell
