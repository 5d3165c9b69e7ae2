#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "chainbell/bounds.hpp"
#include "chainbell/chain.hpp"
#include "chainbell/events.hpp"
#include "chainbell/rng.hpp"

namespace chainbell {

/// The shared randomness of the adversarial model: an angle theta, a radial
/// gate r, and an auxiliary thinning coordinate u. All three are sampled
/// independently and uniformly.
struct HiddenVariable {
    double theta;  // [0, 2*pi)
    double r;      // [0, 1)
    double u;      // [0, 1)
};

/// Parameters of the adversarial local model.
///
/// The circle is split into 4n half-open sectors of width pi/2n. Settings sit
/// at interleaved angle indices (Alice even, Bob odd). A detection fires +1 on
/// the 2n sectors starting at the setting's own index. Emission times follow a
/// staircase over {0, .., 2n-1} time units unless the gate r <= p pins them to
/// zero; with delta_t between 1 and 2 time units, adjacent staircase steps
/// coincide and wider gaps do not. The u coordinate adds setting-independent
/// non-coincidence (on Alice's side) for targets below the natural gamma range.
struct ModelParams {
    ModelParams(SettingsCount n, double p, double thinning_q = 0.0,
                double delta_t = 1.5, double time_unit = 1.0);

    int n;
    double p;
    double thinning_q;
    double delta_t;
    double time_unit;

    SettingsCount settings() const { return SettingsCount(n); }
};

/// Outcome and emission-time offset of one local detection.
struct LocalReading {
    int outcome;           // -1 or +1
    double emission_time;  // multiples of time_unit
};

/// Exact per-pair statistics of the model, from sector measures (no sampling).
struct ExactPairStats {
    ChainedPair pair;
    double coincidence_prob;
    double conditional_corr;
};

/// Angular slot of a setting: Alice's setting a sits at index 2(a-1), Bob's
/// setting b at 2b-1. Adjacent chained pairs end up one sector apart; the
/// closing pair 2n-1 apart.
int angle_index(Side side, int setting, SettingsCount n);

/// Which of the 4n half-open sectors [k*pi/2n, (k+1)*pi/2n) theta falls in.
/// theta is reduced modulo 2*pi first.
int sector(double theta, SettingsCount n);

/// Deterministic local outcome: +1 iff theta lies in the half circle starting
/// at the setting's own angle index. Depends only on this side's inputs.
int outcome(Side side, int setting, double theta, const ModelParams& params);

/// Deterministic local emission time; see ModelParams for the staircase rule.
double emission_time(Side side, int setting, const HiddenVariable& hv,
                     const ModelParams& params);

/// Both local readings for one trial of the given chained pair. Draws one
/// HiddenVariable from rng (theta, r, u in that order); timestamps are
/// base_time plus each side's emission offset.
std::pair<DetectionEvent, DetectionEvent> simulate_trial(const ChainedPair& pair,
                                                         const ModelParams& params,
                                                         KeyedRng& rng,
                                                         std::uint64_t trial_id,
                                                         double base_time);

/// Exact coincidence probability and conditional correlation for one pair,
/// by enumerating the 4n sectors crossed with the gating strata.
ExactPairStats exact_pair_stats(const ChainedPair& pair, const ModelParams& params);

/// All 2n pairs' exact statistics in chain order.
std::vector<ExactPairStats> exact_all_pair_stats(const ModelParams& params);

/// Exact chained Bell value of the model, assembled from exact_pair_stats with
/// the chained grouping (plus signs, minus on the closing pair).
double exact_s_lhv(const ModelParams& params);

/// Exact overlap ratio delta = inf_i P(Lambda_I)/P(Lambda_i), Lambda_I the
/// intersection of all coincidence sets. Requires thinning_q == 0.
double exact_delta(const ModelParams& params);

/// Slack (1-delta) - |E(X_i|Lambda_i) - delta E(X_i|Lambda_I)| for chained
/// pair index i (1-based), from exact sector measures. Requires
/// thinning_q == 0. Nonnegative for any model satisfying the premises; this
/// model saturates it at zero.
double conditional_overlap_slack(const ModelParams& params, int pair_index);

}  // namespace chainbell
