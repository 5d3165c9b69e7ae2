#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainbell/bounds.hpp"
#include "chainbell/coincidence.hpp"
#include "chainbell/events.hpp"
#include "chainbell/lhv_model.hpp"

namespace chainbell {

/// Raised when a requested configuration is inconsistent with the model,
/// e.g. a target gamma above gamma_crit.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class SamplingMode { ChainedOnly, UniformSettings };
enum class SourceKind { Lhv, Quantum };

/// Gating parameter and thinning probability realizing a target gamma.
struct ResolvedModel {
    double p;
    double thinning_q;
};

/// Resolve a target coincidence probability for a single run: within the
/// model's natural range [(2n-1)/2n, 1] the gate parameter alone reaches it;
/// below, the gate stays at 0 and uniform thinning removes the rest. Targets
/// above gamma_crit are rejected -- no local model can fake past critical.
ResolvedModel resolve_gamma_target(SettingsCount n, double gamma);

/// Resolution used by sweeps: pin p at p_crit so conditional correlations
/// stay at the quantum value, and thin down to the requested gamma.
ResolvedModel resolve_gamma_critical_fake(SettingsCount n, double gamma);

/// Full description of one simulated experiment.
struct GeneratorConfig {
    int n;
    double p;
    double thinning_q{0.0};
    std::optional<double> requested_gamma;  // set when the target was gamma
    std::uint64_t trials_per_pair;
    std::uint64_t seed;
    double delta_t{1.5};
    MatchMode mode{MatchMode::TrialSynchronized};
    SamplingMode sampling{SamplingMode::ChainedOnly};
    SourceKind source{SourceKind::Lhv};
};

/// What the analysis side needs to recompute everything from events alone.
struct AnalysisConfig {
    int n;
    double delta_t{1.5};
    MatchMode mode{MatchMode::TrialSynchronized};
};

struct BoundsBlock {
    double local;
    double quantum;
    double gamma_critical;
    double eta_critical;
    double p_critical;
    std::optional<CoincidenceBound> bound_at_gamma_hat;
};

struct Verdicts {
    bool exceeds_local{false};
    bool exceeds_coincidence_bound{false};
    bool loophole_free{false};  // exceeds_local and gamma_hat > gamma_crit
};

struct ExperimentReport {
    AnalysisConfig analysis;
    std::optional<GeneratorConfig> generator;  // present for simulated runs

    std::vector<PairStats> per_pair;
    std::uint64_t non_chained_trials{0};
    std::uint64_t incomplete_trials{0};
    std::uint64_t non_chained_matches{0};

    bool has_estimate{false};
    std::string error;  // set instead of the estimate when a pair is empty
    double s_hat{0.0};
    double s_se{0.0};
    std::optional<double> gamma_hat;

    BoundsBlock bounds{};
    Verdicts verdicts{};
};

/// Deterministic event stream for the configured experiment. Chained-only
/// sampling runs trials_per_pair trials per chained pair; uniform-settings
/// sampling draws both settings independently for trials_per_pair * n^2
/// trials. Trial base times are spaced far enough apart that coincidence
/// windows never straddle trials.
std::vector<DetectionEvent> generate_events(const GeneratorConfig& config);

/// Recompute matching, tallies, estimates, bounds and verdicts from events
/// alone. When some chained pair ends up with no coincidences (or no trials)
/// the report carries an error verdict instead of an S estimate.
ExperimentReport analyze(const AnalysisConfig& config, std::span<const DetectionEvent> events);

/// generate_events + analyze, with the generator config echoed in the report.
ExperimentReport run(const GeneratorConfig& config);

struct SweepRow {
    double gamma;      // requested
    double s_hat;
    double s_se;
    double gamma_hat;  // measured
    double bound;      // clamped coincidence bound at the requested gamma
    double quantum;
};

/// One sweep row at the given grid position (independent per-row seed).
/// Rejects gamma outside (0, gamma_crit(n)].
SweepRow sweep_row(SettingsCount n, double gamma, std::uint64_t trials_per_pair,
                   std::uint64_t seed, std::uint64_t row_index, double delta_t = 1.5,
                   MatchMode mode = MatchMode::TrialSynchronized);

/// Full sweep over a gamma grid; the whole grid is validated upfront.
std::vector<SweepRow> sweep(SettingsCount n, std::span<const double> gamma_grid,
                            std::uint64_t trials_per_pair, std::uint64_t seed,
                            double delta_t = 1.5, MatchMode mode = MatchMode::TrialSynchronized);

/// Reference sampler with the quantum correlations +-cos(pi/2n) and every
/// trial coincident, for contrast with the adversarial model.
ExperimentReport quantum_reference(SettingsCount n, std::uint64_t trials_per_pair,
                                   std::uint64_t seed);

/// Worker cap honoring the CHAINED_BELL_THREADS environment variable.
unsigned worker_count();

}  // namespace chainbell
