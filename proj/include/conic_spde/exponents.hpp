#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conic_spde/geometry.hpp"

namespace conic {

/// Constant operator a D11 + b (D12 + D21) + c D22.
struct OperatorSpec2D {
    double a = 1.0;
    double b = 0.0;
    double c = 1.0;

    void validate() const;
    double det() const { return a * c - b * b; }
};

struct EllipticityBounds {
    double nu1 = 1.0;
    double nu2 = 1.0;

    void validate() const;
};

/// Open interval (lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return lo < v && v < hi; }
    bool empty() const { return !(lo < hi); }
};

struct AdmissibleRanges {
    Interval theta;
    Interval Theta;
};

struct CapEigenpair {
    double Lambda = 0.0;  // first Dirichlet eigenvalue of the Laplace-Beltrami operator
    double lambda = 0.0;  // critical exponent -(d-2)/2 + sqrt(Lambda + (d-2)^2/4)
    int bisection_steps = 0;
};

struct LowerBound {
    double value = 0.0;
    bool vacuous = false;  // value <= 0: no information beyond positivity
};

struct ExponentReport {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    std::optional<double> Lambda;
    std::optional<double> kappa_effective;
    std::optional<LowerBound> lambda_lower_bound;
    AdmissibleRanges ranges;
    /// theta range certified for random coefficients through the lower bound.
    std::optional<Interval> theta_range_random;
    int d = 2;
    double p = 2.0;
};

/// pi / kappa: critical exponent of the Laplacian on a 2D wedge.
double lambda_laplacian_wedge(double kappa);

/// Effective opening angle of the wedge {|arg x - center| < kappa/2} for the
/// constant operator (a, b, c); the critical exponent is pi / result.
/// `center_angle` is the bisector direction.
double effective_angle_tilted(const OperatorSpec2D& op, double kappa, double center_angle);

/// Closed form tan(k~/2) = sqrt(a/c) tan(kappa/2), valid for b = 0, centre 0
/// and kappa != pi.
double effective_angle_diagonal(double a, double c, double kappa);

/// First Dirichlet eigenvalue on an axisymmetric cap by shooting and
/// bisection, and the resulting Laplacian critical exponent. d = 2 is the arc
/// (-cap_angle, cap_angle).
CapEigenpair lambda_cap(const CapDomainSpec& spec);

/// -(d-2)/2 + sqrt(nu1/nu2) sqrt(Lambda + (d-2)^2/4).
LowerBound lambda_lower_bound(const EllipticityBounds& bounds, double Lambda, int d);

/// theta in (p(1 - lambda_plus), p(d - 1 + lambda_minus)), Theta in (d-1, d-1+p).
AdmissibleRanges admissible_ranges(double p, int d, double lambda_plus, double lambda_minus);

/// Polygon: exponents minimised over the vertex cones.
AdmissibleRanges admissible_ranges_polygon(double p, const PolygonDomain& polygon,
                                           const OperatorSpec2D& op);

/// Per-vertex critical exponent of the (constant) operator for each polygon corner.
std::vector<double> polygon_vertex_exponents(const PolygonDomain& polygon, const OperatorSpec2D& op);

struct ExponentQuery {
    int d = 2;
    /// Wedge opening (d = 2) and the angle of its first edge.
    double kappa = kPi / 2;
    double alpha = 0.0;
    /// Cap half-angle for d >= 3.
    double cap_angle = kPi / 2;
    OperatorSpec2D op;
    double p = 2.0;
    /// When set, the report carries the ellipticity lower bound and the theta
    /// range it certifies.
    std::optional<EllipticityBounds> bounds;
};

/// d = 2: exponents pi / kappa~ of the constant operator on the wedge.
/// d >= 3: Laplacian exponents from the cap eigenvalue (op must be the identity).
ExponentReport exponent_report(const ExponentQuery& query);

}  // namespace conic
