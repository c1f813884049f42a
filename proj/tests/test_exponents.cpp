#include <cmath>
#include <random>

#include "conic_spde/errors.hpp"
#include "conic_spde/exponents.hpp"
#include "doctest.h"

using namespace conic;

TEST_CASE("Laplacian wedge exponent") {
    CHECK(lambda_laplacian_wedge(kPi / 2) == 2.0);
    CHECK(lambda_laplacian_wedge(kPi) == 1.0);
    CHECK(lambda_laplacian_wedge(1.5 * kPi) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK_THROWS_AS(lambda_laplacian_wedge(0.0), ValidationError);
    CHECK_THROWS_AS(lambda_laplacian_wedge(kTwoPi), ValidationError);
}

TEST_CASE("tilted operator effective angle") {
    for (double center : {0.0, 0.3, 1.0, 2.5, 5.0})
        CHECK(effective_angle_tilted({1, 0, 1}, 0.8 * kPi, center) == doctest::Approx(0.8 * kPi).epsilon(1e-14));

    const double got = effective_angle_tilted({4, 0, 1}, kPi / 2, 0.0);
    CHECK(std::abs(got - 2.0 * std::atan(2.0)) < 1e-12);
    CHECK(std::abs(got - effective_angle_diagonal(4, 1, kPi / 2)) < 1e-12);
    CHECK(got == doctest::Approx(2.21430).epsilon(1e-5));

    CHECK_THROWS_AS(effective_angle_tilted({1, 2, 1}, 1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(effective_angle_tilted({-1, 0, -1}, 1.0, 0.0), ValidationError);
}

TEST_CASE("property: half-plane is preserved by every admissible operator") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < 1000; ++n) {
        const double a = 0.05 + 10 * unit(gen), c = 0.05 + 10 * unit(gen);
        const double b = (2 * unit(gen) - 1) * 0.999 * std::sqrt(a * c);
        const double center = kTwoPi * unit(gen);
        CHECK(std::abs(effective_angle_tilted({a, b, c}, kPi, center) - kPi) < 1e-12);
    }
}

TEST_CASE("property: arctan and tan forms agree for diagonal operators") {
    double worst = 0;
    for (double ratio : {0.01, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0, 100.0})
        for (int k = 1; k < 40; ++k) {
            const double kappa = kTwoPi * k / 40.0;
            if (std::abs(kappa - kPi) < 1e-9) continue;
            const double diff = std::abs(effective_angle_tilted({ratio, 0, 1}, kappa, 0.0) -
                                         effective_angle_diagonal(ratio, 1, kappa));
            worst = std::max(worst, diff);
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("property: rotating operator and wedge together leaves the angle unchanged") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < 300; ++n) {
        const double a = 0.2 + 5 * unit(gen), c = 0.2 + 5 * unit(gen);
        const double b = (2 * unit(gen) - 1) * 0.9 * std::sqrt(a * c);
        const double kappa = 0.1 + 6.0 * unit(gen);
        const double center = kTwoPi * unit(gen), phi = kTwoPi * unit(gen);
        // A' = Q A Q^T with Q the rotation by phi
        const double cs = std::cos(phi), sn = std::sin(phi);
        const double a2 = cs * cs * a - 2 * sn * cs * b + sn * sn * c;
        const double b2 = sn * cs * a + (cs * cs - sn * sn) * b - sn * cs * c;
        const double c2 = sn * sn * a + 2 * sn * cs * b + cs * cs * c;
        const double base = effective_angle_tilted({a, b, c}, kappa, center);
        const double turned = effective_angle_tilted({a2, b2, c2}, kappa, center + phi);
        CHECK(std::abs(base - turned) < 1e-11);
    }
}

TEST_CASE("cap eigenvalue by shooting") {
    const CapEigenpair hemi = lambda_cap({3, kPi / 2});
    CHECK(std::abs(hemi.Lambda - 2.0) < 1e-8);
    CHECK(std::abs(hemi.lambda - 1.0) < 1e-8);

    for (double kappa : {kPi / 4, kPi / 2, kPi, 1.5 * kPi}) {
        const CapEigenpair arc = lambda_cap({2, kappa / 2});
        CHECK(std::abs(arc.lambda - kPi / kappa) < 1e-8);
    }
    CHECK_THROWS_AS(lambda_cap({1, 1.0}), ValidationError);
    CHECK_THROWS_AS(lambda_cap({3, kPi}), ValidationError);
}

TEST_CASE("property: cap exponent decreases with the cap angle") {
    for (int d : {2, 3, 4}) {
        double previous = INFINITY;
        for (double cap = 0.3; cap < 3.1; cap += 0.35) {
            const double lam = lambda_cap({d, cap}).lambda;
            CHECK(lam > 0);
            CHECK(lam < previous);
            previous = lam;
        }
    }
    // approaching the full sphere the exponent tends to zero
    CHECK(lambda_cap({3, 3.1}).lambda < 0.3);
}

TEST_CASE("ellipticity lower bound") {
    CHECK(lambda_lower_bound({1, 1}, 4, 2).value == 2.0);
    CHECK(lambda_lower_bound({1, 4}, 4, 2).value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lambda_lower_bound({1, 4}, 2, 3).value == doctest::Approx(0.25).epsilon(1e-15));
    const LowerBound weak = lambda_lower_bound({1, 100}, 0.1, 4);
    CHECK(weak.vacuous);
    CHECK(weak.value < 0);
    CHECK_THROWS_AS(lambda_lower_bound({2, 1}, 1, 2), ValidationError);
    for (int d : {2, 3, 5})
        for (double Lambda : {0.5, 2.0, 7.0}) {
            const double shift = 0.5 * (d - 2);
            CHECK(lambda_lower_bound({3, 3}, Lambda, d).value == -shift + std::sqrt(Lambda + shift * shift));
        }
}

TEST_CASE("admissible weight ranges") {
    auto r = admissible_ranges(2, 2, 2, 2);
    CHECK(r.theta.lo == -2.0);
    CHECK(r.theta.hi == 6.0);
    CHECK(r.Theta.lo == 1.0);
    CHECK(r.Theta.hi == 3.0);
    r = admissible_ranges(2, 2, 2.0 / 3, 2.0 / 3);
    CHECK(r.theta.lo == doctest::Approx(2.0 / 3));
    CHECK(r.theta.hi == doctest::Approx(10.0 / 3));
    r = admissible_ranges(2, 2, 1, 1);
    CHECK(r.theta.lo == 0.0);
    CHECK(r.theta.hi == 4.0);
    CHECK_THROWS_AS(admissible_ranges(1.5, 2, 1, 1), ValidationError);

    PolygonDomain ell({{0, 0}, {1, 0}, {1, 1}, {-1, 1}, {-1, -1}, {0, -1}});
    const auto pr = admissible_ranges_polygon(2, ell, {1, 0, 1});
    CHECK(pr.theta.lo == doctest::Approx(2.0 / 3));
    CHECK(pr.theta.hi == doctest::Approx(10.0 / 3));
    CHECK(pr.Theta.lo == 1.0);
    CHECK(pr.Theta.hi == 3.0);
}
