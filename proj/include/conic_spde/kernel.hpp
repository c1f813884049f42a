#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "conic_spde/geometry.hpp"

namespace conic {

/// R = rho_o / (rho_o + sqrt t), J = rho / (rho + sqrt t).
struct BoundFactors {
    double R = 0.0;
    double J = 0.0;
};

BoundFactors bound_factors(const WedgeDomain& domain, double t, Point x);

/// Dirichlet heat kernel of the Laplacian on an infinite 2D wedge, evaluated
/// by its eigenfunction series in the angle with exponentially scaled
/// modified Bessel functions in the radius.
class WedgeKernel {
public:
    /// min_time <= 0 selects r_max^2 * 1e-6.
    explicit WedgeKernel(const WedgeDomain& domain, int n_modes = 40000, double min_time = 0.0);

    const WedgeDomain& domain() const { return domain_; }
    double kappa() const { return domain_.kappa(); }
    int n_modes() const { return n_modes_; }
    double min_time() const { return min_time_; }

    /// G(t, s, x, y) with dt = t - s.
    double eval(double dt, Point x, Point y) const;
    double eval_local(double dt, LocalPolar x, LocalPolar y) const;
    /// Cartesian gradient in the second spatial argument.
    Point grad_y(double dt, Point x, Point y) const;
    Point grad_x(double dt, Point x, Point y) const { return grad_y(dt, y, x); }
    /// (dG/dr', dG/deta') in local polar coordinates of y.
    std::pair<double, double> grad_y_local(double dt, LocalPolar x, LocalPolar y) const;

private:
    void check_time(double dt) const;

    WedgeDomain domain_;
    int n_modes_;
    double min_time_;
};

/// Free-space heat kernel (4 pi t)^{-1} exp(-|x-y|^2 / 4t).
double free_heat_kernel(double dt, Point x, Point y);

/// Two-image kernel of the half plane bounded by the edge of a kappa = pi wedge.
double half_plane_kernel(const WedgeDomain& half_plane, double dt, Point x, Point y);

struct ResidualReport {
    std::vector<double> steps;         // relative step per level
    std::vector<double> max_residual;  // max |d_t F - Lap_x F| per level
    std::vector<double> orders;        // log2 of successive ratios
    double order = 0.0;                // last observed order
};

/// Residual of the heat equation for an arbitrary F(t, x), by central
/// differences with time step h * t and space step h * sqrt(t), at steps h,
/// h/2, h/4.
ResidualReport check_function_residual(const std::function<double(double, Point)>& F,
                                       const std::vector<double>& t_grid, const std::vector<Point>& x_grid,
                                       double h = 0.1);

ResidualReport check_pde_residual(const WedgeKernel& kernel, const std::vector<double>& dt_grid,
                                  const std::vector<Point>& x_grid, Point y, double h = 0.1);

struct GreenSamplePlan {
    int samples = 10000;
    std::uint64_t seed = 1;
    double t_min = 1e-3;
    double t_max = 1.0;
    /// Radii are log-uniform in [lo, hi] * sqrt(t).
    double radius_lo = 1e-2;
    double radius_hi = 6.0;
    /// Candidate sigma values, searched from the largest down.
    std::vector<double> sigmas = {0.25, 0.2, 0.15, 0.1, 0.05, 0.025};
};

struct GreenSigmaRow {
    double sigma = 0.0;
    double N = 0.0;          // max ratio over the planned samples
    double N_doubled = 0.0;  // max ratio over twice as many
    double N_grad = 0.0;
    double N_grad_doubled = 0.0;
    bool stable = false;
};

struct GreenSample {
    double t = 0.0;
    Point x, y;
    double G = 0.0;
    double grad_norm = 0.0;
    double majorant = 0.0;       // at the reported sigma, without N
    double grad_majorant = 0.0;
};

struct GreenBoundFit {
    double sigma = 0.0;       // largest candidate sigma with stable constants
    double N = 0.0;
    double N_doubled = 0.0;
    double relative_change = 0.0;
    double N_grad = 0.0;
    double grad_relative_change = 0.0;
    bool pass = false;
    std::vector<GreenSigmaRow> rows;
    std::vector<GreenSample> samples;
};

/// Fits the constants in G <= N t^{-1} J_x J_y R_x^{l+ - 1} R_y^{l- - 1} e^{-sigma|x-y|^2/t}
/// and |grad_y G| <= N t^{-3/2} J_x R_x^{l+ - 1} R_y^{l- - 1} e^{-sigma|x-y|^2/t}.
/// Stability means the max ratio changes by less than 20% from n to 2n samples.
GreenBoundFit check_green_bound(const WedgeKernel& kernel, double lambda_plus, double lambda_minus,
                                const GreenSamplePlan& plan);

}  // namespace conic
