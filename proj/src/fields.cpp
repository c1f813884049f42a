#include "conic_spde/fields.hpp"

#include <cmath>

#include "conic_spde/errors.hpp"

namespace conic {

double Bump::time_factor(double t) const {
    return omega == 0.0 && phase == 0.0 ? amplitude : amplitude * std::cos(omega * t + phase);
}

double Bump::spatial(Point x) const {
    const Point d = x - center;
    const double s2 = dot(d, d) / (width * width);
    if (s2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - s2));
}

Point Bump::spatial_gradient(Point x) const {
    const Point d = x - center;
    const double s2 = dot(d, d) / (width * width);
    if (s2 >= 1.0) return {0.0, 0.0};
    const double q = 1.0 - s2;
    // d/dx exp(1 - 1/q) = exp(..) * (-1/q^2) * (2 (x - c) / w^2)
    const double factor = -std::exp(1.0 - 1.0 / q) * 2.0 / (q * q * width * width);
    return factor * d;
}

double ScalarField::operator()(double t, Point x) const {
    double total = 0.0;
    for (const auto& b : bumps) total += b.time_factor(t) * b.spatial(x);
    return total;
}

Point ScalarField::gradient(double t, Point x) const {
    Point total;
    for (const auto& b : bumps) total = total + b.time_factor(t) * b.spatial_gradient(x);
    return total;
}

ScalarField ScalarField::scaled(double c) const {
    ScalarField out = *this;
    for (auto& b : out.bumps) b.amplitude *= c;
    return out;
}

ScalarField ScalarField::dilated(double s, double amplitude_factor) const {
    require(s > 0, "dilation factor must be positive");
    ScalarField out = *this;
    for (auto& b : out.bumps) {
        b.center = s * b.center;
        b.width *= s;
        b.amplitude *= amplitude_factor;
    }
    return out;
}

ScalarField combine(double c1, const ScalarField& a, double c2, const ScalarField& b) {
    ScalarField out = a.scaled(c1);
    for (const auto& bump : b.scaled(c2).bumps) out.bumps.push_back(bump);
    return out;
}

double rho(const Domain& domain, Point x) {
    return std::visit([&](const auto& d) { return d.rho(x); }, domain);
}

double rho_vertex(const Domain& domain, Point x) {
    return std::visit([&](const auto& d) { return d.rho_vertex(x); }, domain);
}

bool contains(const Domain& domain, Point x) {
    return std::visit([&](const auto& d) { return d.contains(x); }, domain);
}

void validate_support(const ScalarField& field, const Domain& domain) {
    for (const auto& b : field.bumps) {
        require(b.width > 0, "bump width must be positive");
        if (!contains(domain, b.center) || rho(domain, b.center) <= b.width)
            throw ValidationError("bump support must lie strictly inside the domain");
        if (const auto* w = std::get_if<WedgeDomain>(&domain))
            require(norm(b.center) + b.width <= 0.5 * w->r_max(), "bump support must lie in r <= r_max / 2");
    }
}

}  // namespace conic
