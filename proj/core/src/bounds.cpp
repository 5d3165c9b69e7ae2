#include "chainbell/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chainbell {

namespace {
constexpr double kPi = std::numbers::pi;
}

SettingsCount::SettingsCount(int n) : n_(n) {
    if (n < 2) {
        throw std::domain_error("settings count must be >= 2, got " + std::to_string(n));
    }
}

CoincidenceProbability::CoincidenceProbability(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0) || gamma > 1.0) {
        throw std::domain_error("coincidence probability must be in (0, 1], got " +
                                std::to_string(gamma));
    }
}

double local_bound(SettingsCount n) {
    return 2.0 * n.value() - 2.0;
}

double quantum_value(SettingsCount n) {
    const double two_n = 2.0 * n.value();
    return two_n * std::cos(kPi / two_n);
}

CoincidenceBound coincidence_bound(SettingsCount n, CoincidenceProbability gamma) {
    const double two_n = 2.0 * n.value();
    const double raw = (2.0 * two_n - 2.0) / gamma.value() - two_n;
    const double clamped = std::min(raw, two_n);
    return {raw, clamped, raw > two_n};
}

double gamma_crit(SettingsCount n) {
    const double two_n = 2.0 * n.value();
    const double t = std::tan(kPi / (2.0 * two_n));
    return (two_n - 1.0) / two_n * (1.0 + t * t);
}

double eta_crit(SettingsCount n) {
    const double nn = n.value();
    return 2.0 / (nn / (nn - 1.0) * std::cos(kPi / (2.0 * nn)) + 1.0);
}

double p_crit(SettingsCount n) {
    const double two_n = 2.0 * n.value();
    const double t = std::tan(kPi / (2.0 * two_n));
    return (two_n - 1.0) * t * t;
}

double delta_lower_bound(SettingsCount n, CoincidenceProbability gamma) {
    const double two_n = 2.0 * n.value();
    return std::max(0.0, two_n - (two_n - 1.0) / gamma.value());
}

double p_from_gamma(SettingsCount n, CoincidenceProbability gamma) {
    const double two_n = 2.0 * n.value();
    const double floor_gamma = (two_n - 1.0) / two_n;
    if (gamma.value() < floor_gamma) {
        throw std::domain_error(
            "gamma " + std::to_string(gamma.value()) + " is below the model's natural range [" +
            std::to_string(floor_gamma) + ", 1]; use uniform thinning to reach it");
    }
    return two_n * gamma.value() - (two_n - 1.0);
}

BoundsReport make_bounds_report(SettingsCount n, std::optional<CoincidenceProbability> gamma) {
    BoundsReport report{
        n.value(),
        local_bound(n),
        quantum_value(n),
        gamma_crit(n),
        eta_crit(n),
        p_crit(n),
        std::nullopt,
        std::nullopt,
    };
    if (gamma) {
        report.gamma = gamma->value();
        report.bound_at_gamma = coincidence_bound(n, *gamma);
    }
    return report;
}

}  // namespace chainbell
