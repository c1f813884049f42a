#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conic_spde/norms.hpp"
#include "conic_spde/solver.hpp"

namespace conic {

/// Per-trial random coefficient law; when unset every trial uses spec.coefficients.
struct CoefficientModel {
    CoefficientKind kind = CoefficientKind::piecewise_constant_random;
    double nu1 = 1.0;
    double nu2 = 1.2;
    int n_switches = 4;
};

struct EstimateOptions {
    SolverOptions solver;
    int trials = 64;
    std::uint64_t seed = 0;
    /// Worker threads; 0 uses the hardware concurrency. Results do not depend on it.
    int threads = 0;
    std::optional<CoefficientModel> random_coefficients;
    /// Integration radius; <= 0 selects r_max / 2 for wedges and the whole polygon.
    double max_radius = 0.0;
    int level = 0;
};

struct EstimateReport {
    WeightParams weights;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    double lhs_stderr = 0.0;
    double rhs_stderr = 0.0;
    double ratio_stderr = 0.0;
    int trials = 0;
    int level = 0;
    /// lhs = rhs = 0.
    bool zero_data = false;
    /// rhs = 0 < lhs; ratio is reported as 0.
    bool ratio_undefined = false;
    bool divergence_warning = false;
    std::string warning;
    std::vector<double> trial_lhs;
};

/// Space-time integrals int_0^T int (|u / rho|^p + |grad u|^p) w dx dt and
/// int_0^T int (|rho f0|^p + sum_i |f^i|^p + |g|_{l2}^p) w dx dt with
/// w = rho_o^{theta - Theta} rho^{Theta - 2}, cell-centre quadrature in space
/// and the trapezoid rule over snapshots in time.
double lhs_integral(const SolutionPath& path, const WeightParams& w, double max_radius);
double rhs_integral(const ProblemSpec& spec, const Grid& grid, const std::vector<double>& times, const WeightParams& w,
                    double max_radius);

/// Trial averages for several weights on shared solves (common random numbers).
std::vector<EstimateReport> estimate_ratio(const ProblemSpec& spec, const std::vector<WeightParams>& weights,
                                           const EstimateOptions& options);
EstimateReport estimate_ratio(const ProblemSpec& spec, const WeightParams& w, const EstimateOptions& options);

enum class Classification { stable, growing, indeterminate };

std::string to_string(Classification c);

struct SweepOptions {
    EstimateOptions estimate;
    int levels = 4;
    /// Level l dilates r_max, the data supports and sqrt(T), sqrt(dt) by 2^{-l}
    /// and multiplies n_r by 2^l, so r_1 / delta shrinks with the grading.
    bool dilate = true;
    /// Level l multiplies n_eta by 2^l as well.
    bool refine_angle = false;
};

struct SweepResult {
    /// reports[i][l]: theta_list[i] at level l.
    std::vector<std::vector<EstimateReport>> reports;
    std::vector<Classification> classification;
    /// ratio[l + 1] / ratio[l].
    std::vector<std::vector<double>> growth;
};

/// GROWING: the ratio grows by >= 2x for the last three consecutive level
/// pairs; STABLE: every consecutive change is within a factor 2.
Classification classify_growth(const std::vector<double>& ratios);

/// Problem at sweep level `level`: data, domain and time scaled by 2^{-level}.
ProblemSpec dilate_problem(const ProblemSpec& spec, int level);

SweepResult theta_sweep(const ProblemSpec& spec, double Theta, const std::vector<double>& theta_list, double p,
                        const SweepOptions& options);

enum class DecayDirection { vertex, edge };

std::string to_string(DecayDirection d);
DecayDirection decay_direction_from_string(const std::string& name);

struct DecayOptions {
    /// Fit window in r (vertex) or rho (edge); empty selects a default window.
    double window_lo = 0.0;
    double window_hi = 0.0;
    /// Radius of the arc used for edge fits; <= 0 selects r_max / 4.
    double edge_radius = 0.0;
    double tolerance = 0.1;
};

struct DecayFit {
    DecayDirection direction = DecayDirection::vertex;
    double window_lo = 0.0;
    double window_hi = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    int points = 0;
    /// 1 - theta/p (vertex) or 1 - Theta/p (edge).
    double guarantee = 0.0;
    bool pass = false;
    bool underflow = false;
};

/// Least-squares fit of log|u| against log r along the bisector (vertex) or
/// against log rho along the arc r = edge_radius (edge) of a polar grid function.
DecayFit decay_fit(const GridFunction& u, DecayDirection direction, const WeightParams& w,
                   const DecayOptions& options = {});

/// Solves the spec once on `path` and fits the final snapshot. The window
/// must avoid the data supports.
DecayFit decay_fit(const ProblemSpec& spec, const WienerPath& path, const SolverOptions& solver,
                   DecayDirection direction, const WeightParams& w, const DecayOptions& options = {});

struct HolderOptions {
    double alpha = 0.6;
    double beta = 0.9;
    int pairs = 1000;
    int trials = 8;
    std::uint64_t seed = 0;
    SolverOptions solver;
    double max_radius = 0.0;
    int threads = 0;
};

struct HolderReport {
    double eta = 0.0;
    /// Trial average of max over pairs of Q^p / |t - s|^{p alpha / 2 - 1}.
    double max_quotient = 0.0;
    double max_quotient_doubled = 0.0;
    double relative_change = 0.0;
    std::vector<double> trial_max;
    bool finite = false;
    bool stable = false;
};

/// Q(t, s) = max_x rho^eta rho_o^{(theta - Theta)/p} |u(t, x) - u(s, x)| with
/// eta = beta - 1 + Theta/p over random snapshot pairs. The first `pairs`
/// pairs are a prefix of the doubled sample.
HolderReport time_holder_check(const ProblemSpec& spec, const WeightParams& w, const HolderOptions& options);

/// Holder quotient maximum over explicit pairs of snapshot indices.
double holder_max_quotient(const SolutionPath& path, const WeightParams& w, double alpha, double beta,
                           const std::vector<std::pair<int, int>>& pairs, double max_radius);

}  // namespace conic
