#include <cmath>
#include <cstdio>
#include <filesystem>

#include "conic_spde/errors.hpp"
#include "conic_spde/fields.hpp"
#include "conic_spde/noise.hpp"
#include "conic_spde/rng.hpp"
#include "doctest.h"

using namespace conic;

TEST_CASE("Wiener increments are reproducible with the right moments") {
    const WienerPath a = sample_wiener(123, 3, 100000, 0.01);
    const WienerPath b = sample_wiener(123, 3, 100000, 0.01);
    CHECK(a.increments == b.increments);
    for (int k = 0; k < 3; ++k) {
        double sum = 0, sq = 0;
        for (int j = 0; j < a.n_steps; ++j) {
            sum += a.dw(j, k);
            sq += a.dw(j, k) * a.dw(j, k);
        }
        const double n = a.n_steps;
        CHECK(std::abs(sum / n) < 4.0 * std::sqrt(0.01 / n));
        CHECK(std::abs(sq / n / 0.01 - 1.0) < 0.05);
    }
}

TEST_CASE("trials and modes are independent substreams") {
    const int n = 4096;
    const WienerPath a = sample_wiener(5, 2, n, 1.0, 0), b = sample_wiener(5, 2, n, 1.0, 1);
    double cross = 0, na = 0, nb = 0, modes = 0;
    for (int j = 0; j < n; ++j) {
        cross += a.dw(j, 0) * b.dw(j, 0);
        modes += a.dw(j, 0) * a.dw(j, 1);
        na += a.dw(j, 0) * a.dw(j, 0);
        nb += b.dw(j, 0) * b.dw(j, 0);
    }
    CHECK(std::abs(cross / std::sqrt(na * nb)) < 4.0 / std::sqrt(n));
    CHECK(std::abs(modes / na) < 4.0 / std::sqrt(n));

    // mode k of a wider family equals mode k of a narrower one
    const WienerPath wide = sample_wiener(5, 4, 64, 1.0, 0);
    for (int j = 0; j < 64; ++j) CHECK(wide.dw(j, 1) == a.dw(j, 1));
}

TEST_CASE("coarsening sums increments") {
    const WienerPath fine = sample_wiener(9, 2, 8, 0.25);
    const WienerPath coarse = fine.coarsen(4);
    CHECK(coarse.n_steps == 2);
    CHECK(coarse.dt == 1.0);
    CHECK(coarse.dw(1, 1) == doctest::Approx(fine.dw(4, 1) + fine.dw(5, 1) + fine.dw(6, 1) + fine.dw(7, 1)));
    CHECK_THROWS_AS(fine.coarsen(3), ValidationError);
}

TEST_CASE("increment dump round trip") {
    const WienerPath path = sample_wiener(77, 3, 50, 0.1);
    const auto file = std::filesystem::temp_directory_path() / "conic_increments_test.bin";
    write_increments(path, file.string());
    CHECK(std::filesystem::file_size(file) == 3 * 50 * 8);
    const WienerPath back = read_increments(file.string(), 3, 0.1);
    CHECK(back.increments == path.increments);
    std::filesystem::remove(file);
}

TEST_CASE("coefficient paths respect the ellipticity certificate") {
    const CoefficientPath id = sample_coefficients(1, CoefficientKind::constant, 1, 1, 1.0, 0);
    CHECK(id.at(0.3) == Matrix2{1, 0, 1});
    CHECK(id.isotropic());
    CHECK(id.integrated_scalar(0.2, 0.7) == doctest::Approx(0.5));

    for (std::uint32_t trial = 0; trial < 50; ++trial) {
        const CoefficientPath pc =
            sample_coefficients(11, CoefficientKind::piecewise_constant_random, 0.5, 2.0, 1.0, 7, trial);
        CHECK(pc.segments().size() == 8);
        const CoefficientPath osc = sample_coefficients(11, CoefficientKind::oscillating, 0.5, 2.0, 1.0, 3, trial);
        for (int k = 0; k <= 200; ++k) {
            const double t = k / 200.0;
            for (const Matrix2 m : {pc.at(t), osc.at(t)}) {
                CHECK(m.min_eigenvalue() >= 0.5 - 1e-12);
                CHECK(m.max_eigenvalue() <= 2.0 + 1e-12);
            }
        }
    }
    // segment k depends only on draws up to k: a longer path shares its prefix
    const auto shorter = sample_coefficients(4, CoefficientKind::piecewise_constant_random, 1, 3, 1.0, 2);
    const auto longer = sample_coefficients(4, CoefficientKind::piecewise_constant_random, 1, 3, 1.0, 5);
    for (int k = 0; k < 3; ++k) CHECK(shorter.segments()[k] == longer.segments()[k]);

    CHECK_THROWS_AS(sample_coefficients(1, CoefficientKind::constant, 2, 1, 1.0, 0), ValidationError);
}

TEST_CASE("isotropic time change integrates the scalar multiplier") {
    const auto path = CoefficientPath::piecewise({0.0, 0.5}, {{1, 0, 1}, {3, 0, 3}}, 1, 3);
    CHECK(path.isotropic());
    CHECK(path.integrated_scalar(0.25, 0.75) == doctest::Approx(0.25 + 0.75));
    const auto osc = CoefficientPath::oscillating(1, 3, 2.0, {1, 0, 1});
    CHECK(osc.integrated_scalar(0.0, kPi) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
}

TEST_CASE("bump fields") {
    Bump b{{1.0, 1.0}, 0.5, 2.0};
    ScalarField f{{b}};
    CHECK(f(0.0, {1.0, 1.0}) == doctest::Approx(2.0));
    CHECK(f(0.0, {1.6, 1.0}) == 0.0);
    const Point x{1.2, 0.9};
    const double h = 1e-6;
    const Point g = f.gradient(0.0, x);
    CHECK(g.x == doctest::Approx((f(0, {x.x + h, x.y}) - f(0, {x.x - h, x.y})) / (2 * h)).epsilon(1e-7));
    CHECK(g.y == doctest::Approx((f(0, {x.x, x.y + h}) - f(0, {x.x, x.y - h})) / (2 * h)).epsilon(1e-7));

    const ScalarField zero = combine(1.0, f, -1.0, f);
    CHECK(zero(0.0, x) == 0.0);

    WedgeDomain w(kPi / 2, 0.0, 4.0);
    CHECK_NOTHROW(validate_support(f, w));
    CHECK_THROWS_AS(validate_support(ScalarField{{Bump{{1.0, 0.3}, 0.5}}}, w), ValidationError);
    CHECK_THROWS_AS(validate_support(ScalarField{{Bump{{1.5, 1.5}, 0.5}}}, w), ValidationError);
}
