#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

#include "chainbell/bounds.hpp"

using namespace chainbell;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("settings count rejects n < 2") {
    CHECK_THROWS_AS(SettingsCount(1), std::domain_error);
    CHECK_THROWS_AS(SettingsCount(0), std::domain_error);
    CHECK_THROWS_AS(SettingsCount(-3), std::domain_error);
    CHECK(SettingsCount(2).value() == 2);
}

TEST_CASE("coincidence probability rejects values outside (0, 1]") {
    CHECK_THROWS_AS(CoincidenceProbability(0.0), std::domain_error);
    CHECK_THROWS_AS(CoincidenceProbability(-0.1), std::domain_error);
    CHECK_THROWS_AS(CoincidenceProbability(1.0001), std::domain_error);
    CHECK(CoincidenceProbability(1.0).value() == 1.0);
}

TEST_CASE("local bound is 2n - 2") {
    CHECK(local_bound(SettingsCount(2)) == 2.0);
    CHECK(local_bound(SettingsCount(3)) == 4.0);
    CHECK(local_bound(SettingsCount(5)) == 8.0);
}

TEST_CASE("quantum value against algebraic routes") {
    // n=2: 4 cos(pi/4) = 2 sqrt(2); n=3: 6 cos(pi/6) = 3 sqrt(3);
    // n=5 via the half-angle route with cos(pi/5) = (1 + sqrt 5)/4.
    CHECK(quantum_value(SettingsCount(2)) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(quantum_value(SettingsCount(3)) == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-12));
    const double cos36 = (1.0 + std::sqrt(5.0)) / 4.0;
    const double cos18 = std::sqrt((1.0 + cos36) / 2.0);
    CHECK(quantum_value(SettingsCount(5)) == doctest::Approx(10.0 * cos18).epsilon(1e-12));
}

TEST_CASE("quantum value strictly exceeds local bound for n in 2..100") {
    for (int n = 2; n <= 100; ++n) {
        CHECK(quantum_value(SettingsCount(n)) > local_bound(SettingsCount(n)));
    }
}

TEST_CASE("coincidence bound examples") {
    const CoincidenceBound at_one = coincidence_bound(SettingsCount(2), CoincidenceProbability(1.0));
    CHECK(at_one.raw == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(at_one.clamped == at_one.raw);
    CHECK_FALSE(at_one.vacuous);

    const CoincidenceBound n3 = coincidence_bound(SettingsCount(3), CoincidenceProbability(0.9));
    CHECK(n3.raw == doctest::Approx(10.0 / 0.9 - 6.0).epsilon(1e-15));

    // The clamp engages below gamma = (2n-1)/2n.
    const CoincidenceBound clamped = coincidence_bound(SettingsCount(2), CoincidenceProbability(0.7));
    CHECK(clamped.raw == doctest::Approx(6.0 / 0.7 - 4.0).epsilon(1e-15));
    CHECK(clamped.clamped == 4.0);
    CHECK(clamped.vacuous);
}

TEST_CASE("coincidence bound meets the quantum value at gamma_crit") {
    for (int n = 2; n <= 100; ++n) {
        const SettingsCount sc(n);
        const double bound =
            coincidence_bound(sc, CoincidenceProbability(gamma_crit(sc))).raw;
        CHECK(bound == doctest::Approx(quantum_value(sc)).epsilon(1e-10));
    }
}

TEST_CASE("coincidence bound is strictly decreasing in gamma") {
    for (int n : {2, 3, 5}) {
        const SettingsCount sc(n);
        double previous = coincidence_bound(sc, CoincidenceProbability(0.05)).raw;
        for (double gamma = 0.10; gamma <= 1.0001; gamma += 0.05) {
            const double current =
                coincidence_bound(sc, CoincidenceProbability(std::min(gamma, 1.0))).raw;
            CHECK(current < previous);
            previous = current;
        }
    }
}

TEST_CASE("gamma_crit matches the printed table percentages") {
    // 87.87, 89.32, 90.96, 92.26 percent for n = 2..5, within 0.005 points.
    const double expected[] = {87.87, 89.32, 90.96, 92.26};
    for (int n = 2; n <= 5; ++n) {
        CHECK(std::abs(100.0 * gamma_crit(SettingsCount(n)) - expected[n - 2]) <= 0.005);
    }
}

TEST_CASE("eta_crit matches the printed table percentages") {
    const double expected[] = {82.84, 86.99, 89.61, 91.37};
    for (int n = 2; n <= 5; ++n) {
        CHECK(std::abs(100.0 * eta_crit(SettingsCount(n)) - expected[n - 2]) <= 0.005);
    }
}

TEST_CASE("gamma_crit agrees with its 1/cos^2 form and dominates eta_crit") {
    for (int n = 2; n <= 100; ++n) {
        const SettingsCount sc(n);
        const double two_n = 2.0 * n;
        const double c = std::cos(kPi / (2.0 * two_n));
        const double alternative = (two_n - 1.0) / (two_n * c * c);
        CHECK(gamma_crit(sc) == doctest::Approx(alternative).epsilon(1e-12));
        CHECK(gamma_crit(sc) > eta_crit(sc));
    }
}

TEST_CASE("gamma_crit and eta_crit increase with n") {
    for (int n = 2; n < 100; ++n) {
        CHECK(gamma_crit(SettingsCount(n + 1)) > gamma_crit(SettingsCount(n)));
        CHECK(eta_crit(SettingsCount(n + 1)) > eta_crit(SettingsCount(n)));
    }
}

TEST_CASE("p_crit against surd forms and the gamma_crit identity") {
    // 3 tan^2(pi/8) = 9 - 6 sqrt(2); 5 tan^2(pi/12) = 35 - 20 sqrt(3).
    CHECK(p_crit(SettingsCount(2)) == doctest::Approx(9.0 - 6.0 * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(p_crit(SettingsCount(3)) == doctest::Approx(35.0 - 20.0 * std::sqrt(3.0)).epsilon(1e-12));
    for (int n = 2; n <= 100; ++n) {
        const SettingsCount sc(n);
        const double two_n = 2.0 * n;
        CHECK((two_n - 1.0 + p_crit(sc)) / two_n == doctest::Approx(gamma_crit(sc)).epsilon(1e-12));
    }
}

TEST_CASE("delta lower bound examples and clamping") {
    CHECK(delta_lower_bound(SettingsCount(2), CoincidenceProbability(1.0)) == 1.0);
    CHECK(delta_lower_bound(SettingsCount(2), CoincidenceProbability(0.75)) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(delta_lower_bound(SettingsCount(2), CoincidenceProbability(0.5)) == 0.0);

    // At gamma_crit(3) the bound equals the model's exact delta 6p/(5+p).
    const double p = p_crit(SettingsCount(3));
    const double gamma = gamma_crit(SettingsCount(3));
    const double bound = delta_lower_bound(SettingsCount(3), CoincidenceProbability(gamma));
    CHECK(bound == doctest::Approx(6.0 * p / (5.0 + p)).epsilon(1e-12));
    CHECK(bound == doctest::Approx(0.401923788646685).epsilon(1e-12));
}

TEST_CASE("delta lower bound identity over the p grid") {
    for (int n = 2; n <= 6; ++n) {
        const double two_n = 2.0 * n;
        for (int i = 0; i <= 10; ++i) {
            const double p = i / 10.0;
            const double gamma = (two_n - 1.0 + p) / two_n;
            const double bound = delta_lower_bound(SettingsCount(n), CoincidenceProbability(gamma));
            CHECK(bound == doctest::Approx(two_n * p / (two_n - 1.0 + p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("p_from_gamma inverts the natural range and rejects below it") {
    const SettingsCount n2(2);
    CHECK(p_from_gamma(n2, CoincidenceProbability(gamma_crit(n2))) ==
          doctest::Approx(p_crit(n2)).epsilon(1e-12));
    CHECK(p_from_gamma(n2, CoincidenceProbability(0.75)) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(p_from_gamma(SettingsCount(3), CoincidenceProbability(1.0)) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(p_from_gamma(n2, CoincidenceProbability(0.7)), std::domain_error);
}

TEST_CASE("bounds report carries the closed forms and the optional bound") {
    const BoundsReport plain = make_bounds_report(SettingsCount(3));
    CHECK(plain.n == 3);
    CHECK(plain.local == 4.0);
    CHECK(plain.quantum == doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK_FALSE(plain.gamma.has_value());
    CHECK_FALSE(plain.bound_at_gamma.has_value());
    CHECK(plain.quantum > plain.local);
    CHECK(plain.gamma_critical > plain.eta_critical);
    CHECK((2.0 * 3 - 1.0 + plain.p_critical) / (2.0 * 3) ==
          doctest::Approx(plain.gamma_critical).epsilon(1e-12));

    const BoundsReport with_gamma =
        make_bounds_report(SettingsCount(3), CoincidenceProbability(gamma_crit(SettingsCount(3))));
    REQUIRE(with_gamma.bound_at_gamma.has_value());
    CHECK(with_gamma.bound_at_gamma->raw == doctest::Approx(with_gamma.quantum).epsilon(1e-10));
}
