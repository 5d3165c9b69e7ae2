#pragma once

#include <optional>

namespace chainbell {

/// Number of measurement settings per observer. Valid values are >= 2;
/// construction rejects anything smaller.
class SettingsCount {
public:
    explicit SettingsCount(int n);

    int value() const { return n_; }

private:
    int n_;
};

/// Coincidence probability in (0, 1].
class CoincidenceProbability {
public:
    explicit CoincidenceProbability(double gamma);

    double value() const { return gamma_; }

private:
    double gamma_;
};

/// Coincidence-adjusted upper bound on the chained Bell value.
///
/// `raw` is (4n-2)/gamma - 2n. Each of the n groups in the chained sum has
/// magnitude at most 2, so values above 2n say nothing; `clamped` caps the
/// raw value there and `vacuous` flags when the cap applied.
struct CoincidenceBound {
    double raw;
    double clamped;
    bool vacuous;
};

/// Local realist bound 2n - 2.
double local_bound(SettingsCount n);

/// Quantum prediction 2n cos(pi/2n); strictly above local_bound for all n.
double quantum_value(SettingsCount n);

/// Bound on the coincidence-conditioned chained Bell value at probability gamma.
CoincidenceBound coincidence_bound(SettingsCount n, CoincidenceProbability gamma);

/// Critical coincidence probability (2n-1)/(2n) * (1 + tan^2(pi/4n)).
/// Above it no local model reaches the quantum value.
double gamma_crit(SettingsCount n);

/// Critical detection efficiency 2 / ((n/(n-1)) cos(pi/2n) + 1) for the
/// detection loophole, for side-by-side comparison with gamma_crit.
double eta_crit(SettingsCount n);

/// Gating parameter p = (2n-1) tan^2(pi/4n) that tunes the adversarial model
/// to the quantum value exactly; satisfies (2n-1+p)/(2n) == gamma_crit(n).
double p_crit(SettingsCount n);

/// Lower bound max(0, 2n - (2n-1)/gamma) on the overlap ratio delta.
/// Below gamma = (2n-1)/2n the bound is trivial and clamps to 0.
double delta_lower_bound(SettingsCount n, CoincidenceProbability gamma);

/// Invert gamma = (2n-1+p)/2n for p. Only defined on the model's natural
/// range gamma in [(2n-1)/2n, 1]; below it throws, signalling that the
/// target gamma needs uniform thinning instead (see lhv_model).
double p_from_gamma(SettingsCount n, CoincidenceProbability gamma);

/// All closed-form quantities for one n, optionally with the adjusted bound
/// evaluated at a given gamma.
struct BoundsReport {
    int n;
    double local;
    double quantum;
    double gamma_critical;
    double eta_critical;
    double p_critical;
    std::optional<double> gamma;
    std::optional<CoincidenceBound> bound_at_gamma;
};

BoundsReport make_bounds_report(SettingsCount n,
                                std::optional<CoincidenceProbability> gamma = {});

}  // namespace chainbell
