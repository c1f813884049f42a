#include "conic_spde/exponents.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "conic_spde/errors.hpp"

namespace conic {

void OperatorSpec2D::validate() const {
    require(a + c > 0 && det() > 0, "operator (a, b, c) must satisfy a + c > 0 and ac - b^2 > 0");
}

void EllipticityBounds::validate() const {
    require(nu1 > 0 && nu1 <= nu2, "ellipticity bounds need 0 < nu1 <= nu2");
}

double lambda_laplacian_wedge(double kappa) {
    require(kappa > 0 && kappa < kTwoPi, "kappa must lie in (0, 2pi)");
    return kPi / kappa;
}

double effective_angle_tilted(const OperatorSpec2D& op, double kappa, double center_angle) {
    op.validate();
    require(kappa > 0 && kappa < kTwoPi, "kappa must lie in (0, 2pi)");
    // Rotate the coefficient matrix into the frame of the bisector:
    // [ab; bc]_bar = Q [a b; b c] Q^T with Q = [cos sin; -sin cos].
    const double cs = std::cos(center_angle), sn = std::sin(center_angle);
    const double b_bar = -sn * cs * op.a + (cs * cs - sn * sn) * op.b + sn * cs * op.c;
    const double c_bar = sn * sn * op.a - 2.0 * sn * cs * op.b + cs * cs * op.c;
    const double root_det = std::sqrt(op.det());
    // cot(kappa/2) written as cos/sin so that kappa = pi gives exactly zero
    const double cot_half = std::cos(0.5 * kappa) / std::sin(0.5 * kappa);
    return kPi - std::atan((c_bar * cot_half + b_bar) / root_det) -
           std::atan((c_bar * cot_half - b_bar) / root_det);
}

double effective_angle_diagonal(double a, double c, double kappa) {
    require(a > 0 && c > 0, "diagonal operator needs a, c > 0");
    require(kappa > 0 && kappa < kTwoPi && kappa != kPi, "kappa must lie in (0, 2pi) \\ {pi}");
    double half = std::atan(std::sqrt(a / c) * std::tan(0.5 * kappa));
    if (half < 0) half += kPi;  // kappa/2 in (pi/2, pi) maps to the same branch
    return 2.0 * half;
}

namespace {

using State = std::array<double, 2>;

// Sign of u at the end of the cap, or negative as soon as u crosses zero.
// The Sturm comparison theorem makes "u has a zero in (0, cap]" monotone in Lambda.
bool has_zero_on_cap(double Lambda, int d, double cap_angle) {
    namespace ode = boost::numeric::odeint;
    const double start = std::min(1e-4, 1e-3 * cap_angle);
    const double m = d - 1.0;
    // series start: u = 1 - Lambda t^2 / (2 (d - 1)) + O(t^4)
    State u{1.0 - Lambda * start * start / (2.0 * m), -Lambda * start / m};
    const double weight = d - 2.0;
    auto rhs = [&](const State& s, State& ds, double t) {
        ds[0] = s[1];
        ds[1] = -weight * (std::cos(t) / std::sin(t)) * s[1] - Lambda * s[0];
    };
    bool crossed = false;
    auto observer = [&](const State& s, double) {
        if (s[0] <= 0) crossed = true;
    };
    auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    ode::integrate_adaptive(stepper, rhs, u, start, cap_angle, 1e-3 * cap_angle, observer);
    return crossed || u[0] <= 0;
}

}  // namespace

CapEigenpair lambda_cap(const CapDomainSpec& spec) {
    require(spec.d >= 2, "cap dimension must be >= 2");
    require(spec.cap_angle > 0 && spec.cap_angle < kPi, "cap angle must lie in (0, pi)");
    const int d = spec.d;
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (!has_zero_on_cap(hi, d, spec.cap_angle)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 200) throw NumericalError("cap eigenvalue bracket search failed");
    }
    CapEigenpair out;
    const int max_steps = 200;
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        (has_zero_on_cap(mid, d, spec.cap_angle) ? hi : lo) = mid;
        if (++out.bisection_steps > max_steps) throw NumericalError("cap eigenvalue bisection did not converge");
    }
    out.Lambda = 0.5 * (lo + hi);
    const double shift = 0.5 * (d - 2);
    out.lambda = -shift + std::sqrt(out.Lambda + shift * shift);
    return out;
}

LowerBound lambda_lower_bound(const EllipticityBounds& bounds, double Lambda, int d) {
    bounds.validate();
    const double shift = 0.5 * (d - 2);
    const double value = -shift + std::sqrt(bounds.nu1 / bounds.nu2) * std::sqrt(Lambda + shift * shift);
    return {value, value <= 0};
}

AdmissibleRanges admissible_ranges(double p, int d, double lambda_plus, double lambda_minus) {
    require(p >= 2, "summability exponent p must be >= 2");
    require(lambda_plus > 0 && lambda_minus > 0, "critical exponents must be positive");
    return {{p * (1.0 - lambda_plus), p * (d - 1.0 + lambda_minus)}, {d - 1.0, d - 1.0 + p}};
}

std::vector<double> polygon_vertex_exponents(const PolygonDomain& polygon, const OperatorSpec2D& op) {
    const auto& v = polygon.vertices();
    const auto& angles = polygon.interior_angles();
    std::vector<double> out(v.size());
    for (std::size_t m = 0; m < v.size(); ++m) {
        // the interior cone at p_m starts along the outgoing edge
        const Point e_out = v[(m + 1) % v.size()] - v[m];
        const double start = std::atan2(e_out.y, e_out.x);
        out[m] = kPi / effective_angle_tilted(op, angles[m], start + 0.5 * angles[m]);
    }
    return out;
}

AdmissibleRanges admissible_ranges_polygon(double p, const PolygonDomain& polygon,
                                           const OperatorSpec2D& op) {
    const auto lambdas = polygon_vertex_exponents(polygon, op);
    const double lam = *std::min_element(lambdas.begin(), lambdas.end());
    return admissible_ranges(p, 2, lam, lam);
}

ExponentReport exponent_report(const ExponentQuery& query) {
    require(query.d >= 2, "dimension must be >= 2");
    ExponentReport report;
    report.d = query.d;
    report.p = query.p;
    double Lambda;
    if (query.d == 2) {
        require(query.kappa > 0 && query.kappa < kTwoPi, "wedge angle must lie in (0, 2 pi)");
        const double effective = effective_angle_tilted(query.op, query.kappa, query.alpha + 0.5 * query.kappa);
        report.kappa_effective = effective;
        report.lambda_plus = report.lambda_minus = kPi / effective;
        // the lower bound refers to the Laplacian on the geometric wedge
        Lambda = std::pow(kPi / query.kappa, 2);
    } else {
        const bool laplacian = query.op.a == 1.0 && query.op.b == 0.0 && query.op.c == 1.0;
        require(laplacian, "d >= 3 exponents are available for the Laplacian only");
        const CapEigenpair cap = lambda_cap({query.d, query.cap_angle});
        Lambda = cap.Lambda;
        report.lambda_plus = report.lambda_minus = cap.lambda;
    }
    report.Lambda = Lambda;
    report.ranges = admissible_ranges(query.p, query.d, report.lambda_plus, report.lambda_minus);
    if (query.bounds) {
        const LowerBound lb = lambda_lower_bound(*query.bounds, Lambda, query.d);
        report.lambda_lower_bound = lb;
        if (!lb.vacuous) report.theta_range_random = admissible_ranges(query.p, query.d, lb.value, lb.value).theta;
    }
    return report;
}

}  // namespace conic
