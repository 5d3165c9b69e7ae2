#include "chainbell/lhv_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chainbell {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// One gating stratum of the hidden-variable space: fixed representative
// (r, u) and the probability mass it carries. Within a stratum crossed with
// one sector, every model function is constant, so enumerating cells
// integrates the model exactly.
struct Stratum {
    double r;
    double u;
    double weight;
};

std::vector<Stratum> gating_strata(const ModelParams& params) {
    const double p = params.p;
    const double q = params.thinning_q;
    std::vector<Stratum> strata;
    for (const auto& [u_rep, u_weight] :
         {std::pair{q / 2.0, q}, std::pair{(1.0 + q) / 2.0, 1.0 - q}}) {
        if (u_weight <= 0.0) continue;
        for (const auto& [r_rep, r_weight] :
             {std::pair{p / 2.0, p}, std::pair{(1.0 + p) / 2.0, 1.0 - p}}) {
            if (r_weight <= 0.0) continue;
            strata.push_back({r_rep, u_rep, u_weight * r_weight});
        }
    }
    return strata;
}

void require_no_thinning(const ModelParams& params, const char* what) {
    if (params.thinning_q != 0.0) {
        throw std::invalid_argument(std::string(what) +
                                    " is defined for the unthinned model (thinning_q == 0)");
    }
}

}  // namespace

ModelParams::ModelParams(SettingsCount n_in, double p_in, double thinning_q_in,
                         double delta_t_in, double time_unit_in)
    : n(n_in.value()),
      p(p_in),
      thinning_q(thinning_q_in),
      delta_t(delta_t_in),
      time_unit(time_unit_in) {
    if (p < 0.0 || p > 1.0) {
        throw std::domain_error("gating parameter p must be in [0, 1], got " + std::to_string(p));
    }
    if (thinning_q < 0.0 || thinning_q >= 1.0) {
        throw std::domain_error("thinning_q must be in [0, 1), got " + std::to_string(thinning_q));
    }
    if (!(time_unit > 0.0)) {
        throw std::domain_error("time_unit must be positive");
    }
    // Adjacent staircase steps must coincide, a two-step gap must not.
    if (!(delta_t > time_unit && delta_t < 2.0 * time_unit)) {
        throw std::domain_error("delta_t must lie strictly between one and two time units");
    }
}

int angle_index(Side side, int setting, SettingsCount n) {
    if (setting < 1 || setting > n.value()) {
        throw std::domain_error("setting " + std::to_string(setting) + " outside 1.." +
                                std::to_string(n.value()));
    }
    return side == Side::Alice ? 2 * (setting - 1) : 2 * setting - 1;
}

int sector(double theta, SettingsCount n) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    const int sectors = 4 * n.value();
    int k = static_cast<int>(t / (kTwoPi / sectors));
    return k >= sectors ? sectors - 1 : k;
}

int outcome(Side side, int setting, double theta, const ModelParams& params) {
    const SettingsCount n = params.settings();
    const int sectors = 4 * params.n;
    const int rel = (sector(theta, n) - angle_index(side, setting, n) + sectors) % sectors;
    return rel < 2 * params.n ? +1 : -1;
}

double emission_time(Side side, int setting, const HiddenVariable& hv,
                     const ModelParams& params) {
    const SettingsCount n = params.settings();
    if (side == Side::Alice && hv.u < params.thinning_q) {
        return 4.0 * params.n * params.time_unit;
    }
    if (hv.r <= params.p) {
        return 0.0;
    }
    const int steps = 2 * params.n;
    const int rel = (sector(hv.theta, n) - angle_index(side, setting, n) + 2 * steps) % steps;
    return rel * params.time_unit;
}

std::pair<DetectionEvent, DetectionEvent> simulate_trial(const ChainedPair& pair,
                                                         const ModelParams& params,
                                                         KeyedRng& rng,
                                                         std::uint64_t trial_id,
                                                         double base_time) {
    const HiddenVariable hv{kTwoPi * rng.next_unit(), rng.next_unit(), rng.next_unit()};
    DetectionEvent alice{trial_id, Side::Alice, pair.alice_setting,
                         outcome(Side::Alice, pair.alice_setting, hv.theta, params),
                         base_time + emission_time(Side::Alice, pair.alice_setting, hv, params)};
    DetectionEvent bob{trial_id, Side::Bob, pair.bob_setting,
                       outcome(Side::Bob, pair.bob_setting, hv.theta, params),
                       base_time + emission_time(Side::Bob, pair.bob_setting, hv, params)};
    return {alice, bob};
}

ExactPairStats exact_pair_stats(const ChainedPair& pair, const ModelParams& params) {
    const int sectors = 4 * params.n;
    const double sector_weight = 1.0 / sectors;

    double coincidence = 0.0;
    double corr = 0.0;
    for (const Stratum& stratum : gating_strata(params)) {
        for (int s = 0; s < sectors; ++s) {
            const double theta = (s + 0.5) * (kTwoPi / sectors);
            const HiddenVariable hv{theta, stratum.r, stratum.u};
            const double t_a = emission_time(Side::Alice, pair.alice_setting, hv, params);
            const double t_b = emission_time(Side::Bob, pair.bob_setting, hv, params);
            if (std::abs(t_a - t_b) < params.delta_t) {
                const double w = stratum.weight * sector_weight;
                const int x = outcome(Side::Alice, pair.alice_setting, theta, params) *
                              outcome(Side::Bob, pair.bob_setting, theta, params);
                coincidence += w;
                corr += w * x;
            }
        }
    }
    // Stratum weights are double products; trim the last-ulp drift so the
    // probabilities stay inside their domains.
    coincidence = std::min(1.0, std::max(0.0, coincidence));
    const double cond =
        coincidence > 0.0 ? std::min(1.0, std::max(-1.0, corr / coincidence)) : 0.0;
    return {pair, coincidence, cond};
}

std::vector<ExactPairStats> exact_all_pair_stats(const ModelParams& params) {
    std::vector<ExactPairStats> stats;
    for (const ChainedPair& pair : chained_pairs(params.settings())) {
        stats.push_back(exact_pair_stats(pair, params));
    }
    return stats;
}

double exact_s_lhv(const ModelParams& params) {
    const auto stats = exact_all_pair_stats(params);
    const std::size_t groups = stats.size() / 2;
    double s = 0.0;
    for (std::size_t g = 0; g + 1 < groups; ++g) {
        s += std::abs(stats[2 * g].conditional_corr + stats[2 * g + 1].conditional_corr);
    }
    s += std::abs(stats[stats.size() - 2].conditional_corr -
                  stats[stats.size() - 1].conditional_corr);
    return s;
}

double exact_delta(const ModelParams& params) {
    require_no_thinning(params, "exact_delta");
    const SettingsCount n = params.settings();
    const auto pairs = chained_pairs(n);
    const int sectors = 4 * params.n;
    const double sector_weight = 1.0 / sectors;

    double p_all = 0.0;
    std::vector<double> p_single(pairs.size(), 0.0);
    for (const Stratum& stratum : gating_strata(params)) {
        for (int s = 0; s < sectors; ++s) {
            const double theta = (s + 0.5) * (kTwoPi / sectors);
            const HiddenVariable hv{theta, stratum.r, stratum.u};
            const double w = stratum.weight * sector_weight;
            bool all = true;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const double t_a = emission_time(Side::Alice, pairs[i].alice_setting, hv, params);
                const double t_b = emission_time(Side::Bob, pairs[i].bob_setting, hv, params);
                if (std::abs(t_a - t_b) < params.delta_t) {
                    p_single[i] += w;
                } else {
                    all = false;
                }
            }
            if (all) p_all += w;
        }
    }

    double delta = 1.0;
    for (double p_i : p_single) {
        delta = std::min(delta, p_all / p_i);
    }
    return delta;
}

double conditional_overlap_slack(const ModelParams& params, int pair_index) {
    require_no_thinning(params, "conditional_overlap_slack");
    const SettingsCount n = params.settings();
    const auto pairs = chained_pairs(n);
    if (pair_index < 1 || static_cast<std::size_t>(pair_index) > pairs.size()) {
        throw std::domain_error("pair index " + std::to_string(pair_index) + " outside 1.." +
                                std::to_string(pairs.size()));
    }
    const ChainedPair& pair = pairs[static_cast<std::size_t>(pair_index - 1)];
    const int sectors = 4 * params.n;
    const double sector_weight = 1.0 / sectors;

    // P(Lambda_I) and the unnormalized integral of X_i over Lambda_I.
    double p_all = 0.0;
    double corr_all = 0.0;
    for (const Stratum& stratum : gating_strata(params)) {
        for (int s = 0; s < sectors; ++s) {
            const double theta = (s + 0.5) * (kTwoPi / sectors);
            const HiddenVariable hv{theta, stratum.r, stratum.u};
            bool all = true;
            for (const ChainedPair& other : pairs) {
                const double t_a = emission_time(Side::Alice, other.alice_setting, hv, params);
                const double t_b = emission_time(Side::Bob, other.bob_setting, hv, params);
                if (!(std::abs(t_a - t_b) < params.delta_t)) {
                    all = false;
                    break;
                }
            }
            if (all) {
                const double w = stratum.weight * sector_weight;
                p_all += w;
                corr_all += w * outcome(Side::Alice, pair.alice_setting, theta, params) *
                            outcome(Side::Bob, pair.bob_setting, theta, params);
            }
        }
    }

    const double delta = exact_delta(params);
    const double cond_i = exact_pair_stats(pair, params).conditional_corr;
    const double cond_all = p_all > 0.0 ? corr_all / p_all : 0.0;
    return (1.0 - delta) - std::abs(cond_i - delta * cond_all);
}

}  // namespace chainbell
