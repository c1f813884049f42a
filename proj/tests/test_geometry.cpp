#include <cmath>
#include <random>

#include "conic_spde/errors.hpp"
#include "conic_spde/geometry.hpp"
#include "doctest.h"

using namespace conic;

TEST_CASE("wedge distances at reference points") {
    WedgeDomain quarter(kPi / 2, 0.0, 10.0);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(rho(quarter, {s, s}) == doctest::Approx(std::sin(kPi / 4)).epsilon(1e-14));

    WedgeDomain half(kPi, 0.0, 10.0);
    CHECK(rho(half, {0.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));

    const Point p = rotate({3.0, 4.0}, 0.0);
    WedgeDomain wide(1.9 * kPi, 0.01, 10.0);
    CHECK(rho_vertex(wide, p) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("points outside or on the wedge boundary are rejected") {
    WedgeDomain quarter(kPi / 2, 0.0, 10.0);
    CHECK_THROWS_AS(rho(quarter, {-1.0, 1.0}), DomainMembershipError);
    CHECK_THROWS_AS(rho(quarter, {1.0, 0.0}), DomainMembershipError);
    CHECK_THROWS_AS(rho_vertex(quarter, {0.0, 0.0}), DomainMembershipError);
    CHECK_THROWS_AS(WedgeDomain(0.0, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(WedgeDomain(kTwoPi, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS(WedgeDomain(1.0, 0.0, -1.0), ValidationError);
}

TEST_CASE("polygon distances") {
    PolygonDomain square({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    CHECK(rho(square, {0.5, 0.25}) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rho_vertex(square, {0.5, 0.5}) == doctest::Approx(0.5 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(rho(square, {1.5, 0.5}), DomainMembershipError);

    // L-shape with the reentrant corner at the origin
    PolygonDomain ell({{0, 0}, {1, 0}, {1, 1}, {-1, 1}, {-1, -1}, {0, -1}});
    CHECK(rho_vertex(ell, {0.1, 0.1}) == doctest::Approx(0.1 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(ell.max_interior_angle() == doctest::Approx(1.5 * kPi).epsilon(1e-14));
}

TEST_CASE("polygon orientation and angle bookkeeping") {
    // clockwise input is normalised
    PolygonDomain cw({{0, 1}, {1, 1}, {1, 0}, {0, 0}});
    double total = 0.0;
    for (double a : cw.interior_angles()) {
        CHECK(a == doctest::Approx(kPi / 2).epsilon(1e-14));
        total += a;
    }
    CHECK(total == doctest::Approx(kTwoPi));
    const auto recomputed = polygon_interior_angles(cw.vertices());
    for (std::size_t k = 0; k < recomputed.size(); ++k)
        CHECK(std::abs(recomputed[k] - cw.interior_angles()[k]) < 1e-12);

    CHECK_THROWS_AS(PolygonDomain({{0, 0}, {1, 0}}), ValidationError);
    CHECK_THROWS_AS(PolygonDomain({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), ValidationError);  // bow tie
}

TEST_CASE("polar grid construction") {
    WedgeDomain quarter(kPi / 2, 0.0, 2.0);
    const PolarGrid uniform = build_polar_grid(quarter, 4, 4, 1.0);
    int interior = 0;
    for (int i = 0; i < uniform.n_r(); ++i)
        for (int j = 0; j <= uniform.n_eta(); ++j) {
            if (!uniform.is_boundary(i, j)) ++interior;
            const double eta = uniform.eta[j];
            CHECK((uniform.is_boundary(i, j) || (eta > 0 && eta < quarter.kappa())));
            CHECK(uniform.r[i] > 0);
        }
    CHECK(interior == 9);

    const PolarGrid graded = build_polar_grid(quarter, 4, 4, 2.0);
    const double expected[] = {1.0 / 16, 1.0 / 4, 9.0 / 16, 1.0};
    for (int i = 0; i < 4; ++i) CHECK(graded.r[i] == doctest::Approx(2.0 * expected[i]).epsilon(1e-15));

    CHECK_THROWS_AS(build_polar_grid(quarter, 3, 4, 1.0), ValidationError);
    CHECK_THROWS_AS(build_polar_grid(quarter, 4, 4, 0.5), ValidationError);
}

TEST_CASE("property: wedge distance invariants over random samples") {
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < 2000; ++n) {
        const double kappa = 0.05 + (kTwoPi - 0.1) * unit(gen);
        const double alpha = kTwoPi * unit(gen) * 0.999;
        WedgeDomain w(kappa, alpha, 10.0);
        WedgeDomain unrotated(kappa, 0.0, 10.0);
        const double r = 0.01 + 5.0 * unit(gen);
        const double eta = kappa * (0.001 + 0.998 * unit(gen));
        const Point x = w.from_local(r, eta);
        REQUIRE(w.contains(x));

        const double d = rho(w, x), dv = rho_vertex(w, x);
        CHECK(d > 0);
        CHECK(d <= dv * (1 + 1e-15));

        const double lam = 0.1 + 3.0 * unit(gen);
        const Point lx = lam * x;
        CHECK(std::abs(rho(w, lx) - lam * d) <= 1e-12 * lam * dv);
        CHECK(std::abs(rho_vertex(w, lx) - lam * dv) <= 1e-12 * lam * dv);

        const Point back = rotate(x, -alpha);
        CHECK(std::abs(rho(unrotated, back) - d) <= 1e-12 * dv);
        CHECK(std::abs(rho_vertex(unrotated, back) - dv) <= 1e-12 * dv);
    }
}
