#pragma once

#include <variant>
#include <vector>

#include "conic_spde/geometry.hpp"

namespace conic {

/// amplitude * cos(omega t + phase) * exp(1 - 1 / (1 - |x - c|^2 / width^2)),
/// supported in the open disk of radius `width` about `center`.
struct Bump {
    Point center;
    double width = 1.0;
    double amplitude = 1.0;
    double omega = 0.0;
    double phase = 0.0;

    double time_factor(double t) const;
    double spatial(Point x) const;
    Point spatial_gradient(Point x) const;
};

/// Finite sum of bumps; the zero field has no bumps.
struct ScalarField {
    std::vector<Bump> bumps;

    double operator()(double t, Point x) const;
    Point gradient(double t, Point x) const;
    bool is_zero() const { return bumps.empty(); }
    ScalarField scaled(double c) const;
    /// x -> field(x / s) with amplitude multiplied by `amplitude_factor`.
    ScalarField dilated(double s, double amplitude_factor = 1.0) const;
};

ScalarField combine(double c1, const ScalarField& a, double c2, const ScalarField& b);

/// Vector forcing (f^1, f^2).
struct VectorField {
    ScalarField x;
    ScalarField y;

    Point operator()(double t, Point p) const { return {x(t, p), y(t, p)}; }
    double divergence(double t, Point p) const { return x.gradient(t, p).x + y.gradient(t, p).y; }
    bool is_zero() const { return x.is_zero() && y.is_zero(); }
};

using Domain = std::variant<WedgeDomain, PolygonDomain>;

double rho(const Domain& domain, Point x);
double rho_vertex(const Domain& domain, Point x);
bool contains(const Domain& domain, Point x);

/// Every bump disk must lie in the domain away from the boundary, and for a
/// wedge inside r <= r_max / 2.
void validate_support(const ScalarField& field, const Domain& domain);

}  // namespace conic
