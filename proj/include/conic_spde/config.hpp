#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "conic_spde/norms.hpp"
#include "conic_spde/solver.hpp"
#include "conic_spde/verify.hpp"
#include "json.hpp"

namespace conic {

using Json = nlohmann::ordered_json;

/// Radians, or a multiple/fraction of pi such as "3pi/2", "-pi/4", "0.5pi".
double parse_angle(const std::string& text);

struct CoefficientConfig {
    CoefficientKind kind = CoefficientKind::constant;
    Matrix2 a;
    double nu1 = 1.0;
    double nu2 = 1.0;
    int n_switches = 4;
};

struct KernelVerifyConfig {
    int samples = 10000;
    /// Defaults to 0.95 pi / kappa.
    std::optional<double> lambda_plus;
    std::optional<double> lambda_minus;
    double residual_step = 0.1;
};

struct SweepConfig {
    double Theta = 2.0;
    std::vector<double> thetas = {0.0, 2.0};
    double p = 2.0;
    int levels = 4;
    bool dilate = true;
    bool refine_angle = false;
};

struct NormConfig {
    std::vector<std::string> inputs;
    /// Snapshot index; negative counts from the end.
    int snapshot = -1;
};

struct OutputConfig {
    std::string dir = "out";
    std::string format = "csv";  // csv | binary
};

/// Resolved run configuration; every field has a default.
struct RunConfig {
    std::string command;
    ProblemSpec problem;
    CoefficientConfig coefficients;
    std::vector<WeightParams> weights = {WeightParams{}};
    SolverOptions solver;
    Engine engine = Engine::fd;
    int max_modes = 4000;
    int trials = 1;
    std::uint64_t seed = 0;
    int threads = 0;
    double max_radius = 0.0;
    OutputConfig output;
    KernelVerifyConfig kernel;
    SweepConfig sweep;
    DecayOptions decay;
    DecayDirection decay_direction = DecayDirection::vertex;
    HolderOptions holder;
    ExponentQuery exponents;
    NormConfig norm;

    /// Coefficient path of one trial.
    CoefficientPath coefficient_path(std::uint32_t trial) const;
    /// The problem with trial 0's coefficient path.
    ProblemSpec problem_for_trial(std::uint32_t trial) const;
    EstimateOptions estimate_options() const;
    RepresentationOptions representation_options() const;
};

/// Fixed-schema parse; unknown keys and wrong types raise ValidationError.
/// A missing "seed" falls back to CONIC_SPDE_SEED, then 0.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::string& path);
/// Full resolved configuration; parses back to an identical RunConfig.
Json config_to_json(const RunConfig& config);

}  // namespace conic
