#include "chainbell/coincidence.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace chainbell {

namespace {

void require_window(double delta_t) {
    if (!(delta_t > 0.0)) {
        throw std::domain_error("delta_t must be positive, got " + std::to_string(delta_t));
    }
}

void require_sorted(std::span<const DetectionEvent> stream, const char* name) {
    for (std::size_t i = 1; i < stream.size(); ++i) {
        if (stream[i].timestamp < stream[i - 1].timestamp) {
            throw std::invalid_argument(std::string(name) + " stream is not sorted by timestamp (position " +
                                        std::to_string(i) + ")");
        }
    }
}

}  // namespace

TrialMatchResult match_trial_synchronized(std::span<const DetectionEvent> events,
                                          double delta_t) {
    require_window(delta_t);

    struct Slot {
        std::optional<DetectionEvent> alice;
        std::optional<DetectionEvent> bob;
    };
    std::map<std::uint64_t, Slot> trials;
    for (const DetectionEvent& event : events) {
        Slot& slot = trials[event.trial_id];
        auto& side = event.side == Side::Alice ? slot.alice : slot.bob;
        if (side.has_value()) {
            throw std::invalid_argument("trial " + std::to_string(event.trial_id) +
                                        " has two events on one side");
        }
        side = event;
    }

    TrialMatchResult result;
    result.trials.reserve(trials.size());
    for (const auto& [trial_id, slot] : trials) {
        if (!slot.alice || !slot.bob) {
            ++result.incomplete_trials;
            continue;
        }
        const DetectionEvent& a = *slot.alice;
        const DetectionEvent& b = *slot.bob;
        result.trials.push_back({trial_id, a.setting, b.setting, a.outcome, b.outcome,
                                 a.timestamp, b.timestamp,
                                 std::abs(a.timestamp - b.timestamp) < delta_t});
    }
    return result;
}

namespace {

// One maximal run of events with no gap of delta_t or more between merged
// neighbors. No window can bridge such a gap, so clusters match independently.
struct Cluster {
    std::vector<std::size_t> alice;  // indices into the full streams
    std::vector<std::size_t> bob;
};

// Non-crossing pairing of one cluster: as many matches as possible, then the
// smallest total |t - t'|. Ties prefer committing a match over skipping the
// bob over skipping the alice, which resolves equidistant candidates toward
// the earlier event on either side.
void match_cluster(const Cluster& cluster, std::span<const DetectionEvent> alice,
                   std::span<const DetectionEvent> bob, double delta_t,
                   std::vector<StreamMatch>& matches) {
    const std::size_t na = cluster.alice.size();
    const std::size_t nb = cluster.bob.size();
    if (na == 0 || nb == 0) return;

    enum Move : unsigned char { kMatch, kSkipBob, kSkipAlice };
    struct Cell {
        int matched;
        double distance;
        Move move;
    };
    std::vector<Cell> table((na + 1) * (nb + 1));
    auto at = [&](std::size_t i, std::size_t j) -> Cell& { return table[i * (nb + 1) + j]; };

    for (std::size_t j = 0; j <= nb; ++j) at(na, j) = {0, 0.0, kSkipBob};
    for (std::size_t i = 0; i < na; ++i) at(i, nb) = {0, 0.0, kSkipAlice};

    auto better = [](const Cell& x, const Cell& y) {
        if (x.matched != y.matched) return x.matched > y.matched;
        return x.distance < y.distance;
    };
    for (std::size_t i = na; i-- > 0;) {
        for (std::size_t j = nb; j-- > 0;) {
            const double gap = std::abs(alice[cluster.alice[i]].timestamp -
                                        bob[cluster.bob[j]].timestamp);
            Cell best{at(i + 1, j).matched, at(i + 1, j).distance, kSkipAlice};
            const Cell skip_bob{at(i, j + 1).matched, at(i, j + 1).distance, kSkipBob};
            if (!better(best, skip_bob)) best = skip_bob;
            if (gap < delta_t) {
                const Cell match{at(i + 1, j + 1).matched + 1, at(i + 1, j + 1).distance + gap,
                                 kMatch};
                if (!better(best, match)) best = match;
            }
            at(i, j) = best;
        }
    }

    std::size_t i = 0;
    std::size_t j = 0;
    while (i < na && j < nb) {
        switch (at(i, j).move) {
            case kMatch:
                matches.push_back({cluster.alice[i], cluster.bob[j]});
                ++i;
                ++j;
                break;
            case kSkipBob: ++j; break;
            case kSkipAlice: ++i; break;
        }
    }
}

}  // namespace

StreamMatchResult match_stream_windowed(std::span<const DetectionEvent> alice,
                                        std::span<const DetectionEvent> bob,
                                        double delta_t) {
    require_window(delta_t);
    require_sorted(alice, "alice");
    require_sorted(bob, "bob");

    // Merge the two streams and cut clusters at gaps of delta_t or more.
    std::vector<Cluster> clusters;
    Cluster current;
    double previous_time = 0.0;
    bool have_previous = false;
    std::size_t i = 0;
    std::size_t j = 0;
    auto flush = [&] {
        if (!current.alice.empty() || !current.bob.empty()) {
            clusters.push_back(std::move(current));
            current = {};
        }
    };
    while (i < alice.size() || j < bob.size()) {
        const bool take_alice =
            j >= bob.size() ||
            (i < alice.size() && alice[i].timestamp <= bob[j].timestamp);
        const double t = take_alice ? alice[i].timestamp : bob[j].timestamp;
        if (have_previous && t - previous_time >= delta_t) {
            flush();
        }
        if (take_alice) {
            current.alice.push_back(i++);
        } else {
            current.bob.push_back(j++);
        }
        previous_time = t;
        have_previous = true;
    }
    flush();

    StreamMatchResult result;
    for (const Cluster& cluster : clusters) {
        match_cluster(cluster, alice, bob, delta_t, result.matches);
    }

    std::vector<char> alice_used(alice.size(), 0);
    std::vector<char> bob_used(bob.size(), 0);
    for (const StreamMatch& match : result.matches) {
        alice_used[match.alice_index] = 1;
        bob_used[match.bob_index] = 1;
    }
    for (std::size_t k = 0; k < alice.size(); ++k) {
        if (!alice_used[k]) result.alice_singles.push_back(k);
    }
    for (std::size_t k = 0; k < bob.size(); ++k) {
        if (!bob_used[k]) result.bob_singles.push_back(k);
    }
    return result;
}

double PairStats::std_err() const {
    if (coincidences == 0) return 0.0;
    const double c = cond_corr();
    return std::sqrt(std::max(0.0, 1.0 - c * c) / static_cast<double>(coincidences));
}

AccumulatedStats accumulate_stats(SettingsCount n, std::span<const CoincidentMatch> matches,
                                  std::span<const std::uint64_t> trials_per_pair) {
    const auto pairs = chained_pairs(n);
    if (trials_per_pair.size() != pairs.size()) {
        throw std::invalid_argument("expected " + std::to_string(pairs.size()) +
                                    " per-pair trial counts, got " +
                                    std::to_string(trials_per_pair.size()));
    }

    AccumulatedStats result;
    result.per_pair.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        result.per_pair.push_back({pairs[i], trials_per_pair[i], 0, 0.0});
    }
    for (const CoincidentMatch& match : matches) {
        const auto index = pair_index_of(n, match.alice_setting, match.bob_setting);
        if (!index) {
            ++result.non_chained_matches;
            continue;
        }
        PairStats& stats = result.per_pair[*index];
        ++stats.coincidences;
        stats.corr_sum += match.alice_outcome * match.bob_outcome;
    }
    for (const PairStats& stats : result.per_pair) {
        if (stats.coincidences > stats.trials) {
            throw std::invalid_argument("pair " + std::to_string(stats.pair.index) +
                                        " has more coincidences than trials");
        }
    }
    return result;
}

SEstimate s_estimator(std::span<const PairStats> stats, SettingsCount n) {
    const std::size_t expected = 2 * static_cast<std::size_t>(n.value());
    if (stats.size() != expected) {
        throw std::invalid_argument("expected " + std::to_string(expected) + " pair stats, got " +
                                    std::to_string(stats.size()));
    }
    for (const PairStats& pair_stats : stats) {
        if (!pair_stats.has_correlation()) {
            throw std::runtime_error("pair " + std::to_string(pair_stats.pair.index) + " (alice " +
                                     std::to_string(pair_stats.pair.alice_setting) + ", bob " +
                                     std::to_string(pair_stats.pair.bob_setting) +
                                     ") has zero coincidences; conditional correlation undefined");
        }
    }

    double s = 0.0;
    double variance = 0.0;
    for (std::size_t g = 0; g + 1 < stats.size() / 2; ++g) {
        s += std::abs(stats[2 * g].cond_corr() + stats[2 * g + 1].cond_corr());
    }
    s += std::abs(stats[stats.size() - 2].cond_corr() - stats[stats.size() - 1].cond_corr());
    for (const PairStats& pair_stats : stats) {
        const double se = pair_stats.std_err();
        variance += se * se;
    }
    return {s, std::sqrt(variance)};
}

double gamma_estimator(std::span<const PairStats> stats) {
    if (stats.empty()) {
        throw std::invalid_argument("gamma_estimator needs at least one pair");
    }
    double gamma = 1.0;
    for (const PairStats& pair_stats : stats) {
        if (pair_stats.trials == 0) {
            throw std::invalid_argument("pair " + std::to_string(pair_stats.pair.index) +
                                        " has zero trials");
        }
        gamma = std::min(gamma, pair_stats.gamma_hat());
    }
    return gamma;
}

}  // namespace chainbell
