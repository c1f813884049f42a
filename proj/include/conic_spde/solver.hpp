#pragma once

#include <memory>
#include <string>
#include <vector>

#include "conic_spde/fields.hpp"
#include "conic_spde/geometry.hpp"
#include "conic_spde/noise.hpp"

namespace conic {

/// Spatial profiles g^1..g^K of the retained Wiener modes.
struct NoiseSpec {
    std::vector<ScalarField> fields;

    int K() const { return static_cast<int>(fields.size()); }
};

/// du = (a^{ij}(t) u_{x^i x^j} + f0 + f^i_{x^i}) dt + g^k dw^k on (0, T] with
/// zero Dirichlet data.
struct ProblemSpec {
    Domain domain = WedgeDomain(kPi / 2, 0.0, 2.0);
    CoefficientPath coefficients = CoefficientPath::constant({1.0, 0.0, 1.0});
    ScalarField f0;
    VectorField f;
    NoiseSpec noise;
    ScalarField u0;
    double T = 0.1;
    double dt = 1e-3;

    int n_steps() const;
    /// Data supports and time grid; throws ValidationError.
    void validate() const;
};

/// Same domain, coefficients and time grid; data c1 * a + c2 * b.
ProblemSpec combine(double c1, const ProblemSpec& a, double c2, const ProblemSpec& b);

struct GridSpec {
    int n_r = 32;
    int n_eta = 16;
    double grading = 1.0;
    double h = 0.05;  // lattice spacing for polygons
};

std::shared_ptr<const Grid> make_grid(const Domain& domain, const GridSpec& spec);

enum class Scheme { semi_implicit, explicit_euler };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SolverOptions {
    GridSpec grid;
    Scheme scheme = Scheme::semi_implicit;
    /// Snapshot spacing in steps, at most 10; the final step is always stored.
    int snapshot_every = 1;
    /// Explicit stability constant in dt <= c_stab h_min^2 / nu2.
    double c_stab = 0.2;
};

struct SolutionPath {
    std::shared_ptr<const Grid> grid;
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;
    WienerPath wiener;
    CoefficientPath coefficients;
    /// Nodes with |x| above this radius were not evaluated (representation engine).
    double valid_radius = 0.0;
    std::vector<std::string> warnings;

    GridFunction snapshot(std::size_t k) const { return {grid, snapshots[k]}; }
    const std::vector<double>& final_values() const { return snapshots.back(); }
};

/// Euler-Maruyama finite differences on the polar (wedge) or masked Cartesian
/// (polygon) grid. The semi-implicit step solves
/// (I - dt A_n) u^{n+1} = u^n + dt (f0 + div f)(t_n) + g^k(t_n) dw^k_n.
SolutionPath solve_fd(const ProblemSpec& spec, const WienerPath& path, const SolverOptions& options);

struct RepresentationOptions {
    GridSpec grid;  // output grid
    /// Output times, multiples of dt in (0, T]; empty selects {T}.
    std::vector<double> times;
    /// Only nodes with |x| <= eval_radius are computed; <= 0 selects r_max / 2.
    double eval_radius = 0.0;
    int max_modes = 4000;
    double coefficient_tol = 1e-13;
    /// Evaluate the divergence forcing through grad_y G (true) or as G against div f.
    bool gradient_form = true;
};

/// Green's function representation for a(t) = alpha(t) I on a wedge. The
/// stochastic convolution is sum_j int G(tau(s_j, t), x, y) g^k(s_j, y) dy dw^k_j
/// on the increments of `path`; deterministic time integrals use the
/// trapezoid rule on the same grid, with the tau = 0 end point taken as its
/// delta limit.
SolutionPath solve_representation(const ProblemSpec& spec, const WienerPath& path,
                                  const RepresentationOptions& options);

enum class Engine { fd, representation };

std::string to_string(Engine engine);
Engine engine_from_string(const std::string& name);

struct LinearityReport {
    double max_deviation = 0.0;
    double scale = 0.0;  // max |c1 u1| + |c2 u2|
    bool pass = false;
};

/// Compares solve(c1 D1 + c2 D2) with c1 solve(D1) + c2 solve(D2) on one path.
LinearityReport pathwise_linearity_check(const ProblemSpec& d1, const ProblemSpec& d2, const WienerPath& path,
                                         double c1, double c2, Engine engine, const SolverOptions& fd_options,
                                         const RepresentationOptions& rep_options, double tolerance = 1e-10);

}  // namespace conic
