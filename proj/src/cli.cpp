#include "conic_spde/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "conic_spde/config.hpp"
#include "conic_spde/errors.hpp"
#include "conic_spde/exponents.hpp"
#include "conic_spde/io.hpp"
#include "conic_spde/kernel.hpp"
#include "conic_spde/rng.hpp"

namespace conic {

namespace {

const std::vector<std::string> kCommands = {"exponents", "kernel-verify", "simulate", "norm",
                                            "sweep",     "decay",         "holder"};

const char* kUsage = R"(usage: conic_spde <subcommand> [options]

subcommands:
  exponents      critical exponents and admissible weight ranges (JSON)
  kernel-verify  wedge heat-kernel checks and Green bound fit (JSON)
  simulate       solve the equation, write snapshots (CSV or binary blocks)
  norm           weighted norm of a stored snapshot (JSON)
  sweep          theta sweep of the estimate ratio (CSV + JSON)
  decay          decay-rate fit near the vertex or an edge (JSON)
  holder         time Holder quotients (JSON)

Run `conic_spde <subcommand> --help` for options. Config files are JSON;
flags override file values. Every run writes <out>/manifest.json, which can be
passed back with --config to reproduce the outputs.

exit status: 0 ok, 2 invalid input, 3 numerical failure, 64 usage
)";

struct Common {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int trials = 1;
    int threads = 0;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* trials_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* out_opt = nullptr;
};

void add_common(CLI::App& app, Common& c, bool with_trials) {
    app.add_option("--config", c.config, "JSON configuration (or a manifest from an earlier run)");
    c.out_opt = app.add_option("--out", c.out, "output directory");
    c.seed_opt = app.add_option("--seed", c.seed, "master seed (fallback: CONIC_SPDE_SEED, then 0)");
    c.threads_opt = app.add_option("--threads", c.threads, "worker threads, 0 = all cores");
    if (with_trials) c.trials_opt = app.add_option("--trials", c.trials, "independent trials");
}

RunConfig resolve(const Common& c, const std::string& command) {
    RunConfig config = c.config.empty() ? config_from_json(Json::object()) : load_config(c.config);
    if (!config.command.empty() && config.command != command)
        throw ValidationError("config was written for '" + config.command + "', not '" + command + "'");
    config.command = command;
    if (c.out_opt && c.out_opt->count()) config.output.dir = c.out;
    if (c.seed_opt && c.seed_opt->count()) config.seed = c.seed;
    if (c.trials_opt && c.trials_opt->count()) config.trials = c.trials;
    if (c.threads_opt && c.threads_opt->count()) config.threads = c.threads;
    // re-resolve so derived settings (coefficient paths, holder options) see the overrides
    return config_from_json(config_to_json(config));
}

std::string out_path(const RunConfig& c, const std::string& name) {
    return (std::filesystem::path(c.output.dir) / name).string();
}

void write_manifest(const RunConfig& c) { write_json_file(out_path(c, "manifest.json"), config_to_json(c)); }

int run_exponents(const Common& common, const std::vector<std::pair<CLI::Option*, double*>>& overrides,
                  const std::vector<std::pair<CLI::Option*, std::string*>>& angles, CLI::Option* d_opt, int d,
                  std::ostream& out) {
    RunConfig c = resolve(common, "exponents");
    ExponentQuery& q = c.exponents;
    // angles arrive as text so that "3pi/2" works
    for (auto& [opt, text] : angles)
        if (opt->count()) {
            const double v = parse_angle(*text);
            if (opt->get_name() == "--kappa") q.kappa = v;
            if (opt->get_name() == "--alpha") q.alpha = v;
            if (opt->get_name() == "--cap-angle") q.cap_angle = v;
        }
    double nu1 = q.bounds ? q.bounds->nu1 : 0.0, nu2 = q.bounds ? q.bounds->nu2 : 0.0;
    bool bounds = q.bounds.has_value();
    for (auto& [opt, value] : overrides)
        if (opt->count()) {
            const std::string& name = opt->get_name();
            if (name == "--p") q.p = *value;
            if (name == "--a") q.op.a = *value;
            if (name == "--b") q.op.b = *value;
            if (name == "--c") q.op.c = *value;
            if (name == "--nu1") nu1 = *value, bounds = true;
            if (name == "--nu2") nu2 = *value, bounds = true;
        }
    if (d_opt->count()) q.d = d;
    if (bounds) q.bounds = EllipticityBounds{nu1, nu2};

    Json report;
    if (const auto* poly = std::get_if<PolygonDomain>(&c.problem.domain); poly && !common.config.empty()) {
        const std::vector<double> lambdas = polygon_vertex_exponents(*poly, q.op);
        const AdmissibleRanges ranges = admissible_ranges_polygon(q.p, *poly, q.op);
        report = {{"domain", "polygon"},
                  {"p", q.p},
                  {"vertex_lambda", lambdas},
                  {"lambda", *std::min_element(lambdas.begin(), lambdas.end())},
                  {"theta_range", {ranges.theta.lo, ranges.theta.hi}},
                  {"Theta_range", {ranges.Theta.lo, ranges.Theta.hi}}};
    } else {
        report = to_json(exponent_report(q));
        report["kappa"] = q.kappa;
    }
    out << report.dump(2) << "\n";
    write_json_file(out_path(c, "exponents.json"), report);
    write_manifest(c);
    return kExitOk;
}

int run_kernel_verify(const Common& common, std::ostream& out) {
    const RunConfig c = resolve(common, "kernel-verify");
    const auto* dom = std::get_if<WedgeDomain>(&c.problem.domain);
    if (!dom) throw ValidationError("kernel-verify needs a wedge domain");
    const WedgeKernel kernel(*dom);
    const double kappa = dom->kappa(), scale = dom->r_max() / 2;
    RandomStream stream(c.seed, 0x6b766572, 0);

    double edge = 0.0, symmetry = 0.0, reflection = 0.0;
    const bool half_plane = std::abs(kappa - kPi) < 1e-12;
    for (int n = 0; n < 200; ++n) {
        const double t = std::exp(stream.uniform(std::log(1e-3), std::log(1.0))) * scale * scale;
        const LocalPolar x{stream.uniform(0.05, 1.5) * scale, stream.uniform(0.0, kappa)};
        const LocalPolar y{stream.uniform(0.05, 1.5) * scale, stream.uniform(0.0, kappa)};
        const double g = kernel.eval_local(t, x, y);
        const double peak = 1.0 / t;
        edge = std::max({edge, std::abs(kernel.eval_local(t, {x.r, 0.0}, y)) / peak,
                         std::abs(kernel.eval_local(t, {x.r, kappa}, y)) / peak});
        if (g > 1e-300) symmetry = std::max(symmetry, std::abs(g - kernel.eval_local(t, y, x)) / g);
        if (half_plane) {
            const Point px = dom->from_local(x.r, x.eta), py = dom->from_local(y.r, y.eta);
            reflection = std::max(reflection, std::abs(g - half_plane_kernel(*dom, t, px, py)) / peak);
        }
    }

    std::vector<double> times = {0.05 * scale * scale, 0.1 * scale * scale, 0.2 * scale * scale};
    std::vector<Point> xs;
    for (double r : {0.6, 0.9, 1.2})
        for (double f : {0.3, 0.5, 0.7}) xs.push_back(dom->from_local(r * scale, f * kappa));
    const ResidualReport residual =
        check_pde_residual(kernel, times, xs, dom->from_local(0.8 * scale, 0.45 * kappa), c.kernel.residual_step);

    const double lp = c.kernel.lambda_plus.value_or(0.95 * kPi / kappa);
    const double lm = c.kernel.lambda_minus.value_or(0.95 * kPi / kappa);
    GreenSamplePlan plan;
    plan.samples = c.kernel.samples;
    plan.seed = c.seed;
    const GreenBoundFit fit = check_green_bound(kernel, lp, lm, plan);

    Json rows = Json::array();
    for (const auto& r : fit.rows)
        rows.push_back({{"sigma", r.sigma},
                        {"N", r.N},
                        {"N_doubled", r.N_doubled},
                        {"N_grad", r.N_grad},
                        {"N_grad_doubled", r.N_grad_doubled},
                        {"stable", r.stable}});
    Json report = {{"kappa", kappa},
                   {"max_edge_value_over_peak", edge},
                   {"max_symmetry_error", symmetry},
                   {"residual_orders", residual.orders},
                   {"residual_order", residual.order},
                   {"green_bound",
                    {{"lambda_plus", lp},
                     {"lambda_minus", lm},
                     {"sigma", fit.sigma},
                     {"N", fit.N},
                     {"N_doubled", fit.N_doubled},
                     {"relative_change", fit.relative_change},
                     {"N_grad", fit.N_grad},
                     {"grad_relative_change", fit.grad_relative_change},
                     {"pass", fit.pass},
                     {"rows", rows}}}};
    if (half_plane) report["max_reflection_error_over_peak"] = reflection;
    write_json_file(out_path(c, "kernel.json"), report);
    write_manifest(c);
    out << report.dump(2) << "\n";
    return kExitOk;
}

int run_simulate(const Common& common, const std::string& format, CLI::Option* format_opt, const std::string& engine,
                 CLI::Option* engine_opt, std::ostream& out) {
    RunConfig c = resolve(common, "simulate");
    if (format_opt->count()) c.output.format = format;
    if (engine_opt->count()) c.engine = engine_from_string(engine);
    c = config_from_json(config_to_json(c));
    Json files = Json::array(), warnings = Json::array(), final_max = Json::array();
    for (int trial = 0; trial < c.trials; ++trial) {
        const ProblemSpec spec = c.problem_for_trial(static_cast<std::uint32_t>(trial));
        const WienerPath path =
            sample_wiener(c.seed, spec.noise.K(), spec.n_steps(), spec.dt, static_cast<std::uint32_t>(trial));
        RepresentationOptions ro = c.representation_options();
        if (c.engine == Engine::representation) {
            for (int k = c.solver.snapshot_every; k <= spec.n_steps(); k += c.solver.snapshot_every)
                ro.times.push_back(k * spec.dt);
            if (ro.times.empty() || std::abs(ro.times.back() - spec.T) > 1e-12 * spec.T) ro.times.push_back(spec.T);
        }
        const SolutionPath solution =
            c.engine == Engine::fd ? solve_fd(spec, path, c.solver) : solve_representation(spec, path, ro);
        char stem[32];
        std::snprintf(stem, sizeof stem, "trial_%04d", trial);
        if (c.output.format == "binary") {
            write_snapshots_binary(out_path(c, std::string(stem) + ".bin"), solution);
            files.push_back(std::string(stem) + ".bin");
        } else {
            for (const auto& f : write_snapshots_csv(out_path(c, stem), solution))
                files.push_back(std::filesystem::path(f).filename().string());
        }
        double m = 0.0;
        for (double v : solution.final_values()) m = std::max(m, std::abs(v));
        final_max.push_back(m);
        for (const auto& w : solution.warnings) warnings.push_back(w);
    }
    Json summary = {{"engine", to_string(c.engine)},
                    {"trials", c.trials},
                    {"files", files},
                    {"max_abs_final", final_max},
                    {"warnings", warnings}};
    write_json_file(out_path(c, "summary.json"), summary);
    write_manifest(c);
    out << summary.dump(2) << "\n";
    return kExitOk;
}

int run_norm(const Common& common, const std::vector<std::string>& inputs, CLI::Option* inputs_opt, int snapshot,
             CLI::Option* snapshot_opt, const std::vector<std::pair<CLI::Option*, double*>>& weights, int m,
             CLI::Option* m_opt, double max_radius, CLI::Option* radius_opt, std::ostream& out) {
    RunConfig c = resolve(common, "norm");
    if (inputs_opt->count()) c.norm.inputs = inputs;
    if (snapshot_opt->count()) c.norm.snapshot = snapshot;
    if (radius_opt->count()) c.max_radius = max_radius;
    WeightParams& w = c.weights.front();
    for (auto& [opt, value] : weights)
        if (opt->count()) {
            if (opt->get_name() == "--p") w.p = *value;
            if (opt->get_name() == "--theta") w.theta = *value;
            if (opt->get_name() == "--Theta") w.Theta = *value;
        }
    if (m_opt->count()) w.m = m;
    w.validate();
    if (c.norm.inputs.empty()) throw ValidationError("norm needs at least one --input snapshot file");
    NormOptions options;
    if (c.max_radius > 0) options.max_radius = c.max_radius;
    std::vector<double> values;
    bool divergence = false;
    std::string warning;
    for (const auto& file : c.norm.inputs) {
        const SnapshotFile s = read_snapshots_binary(file);
        const int n = static_cast<int>(s.snapshots.size());
        const int k = c.norm.snapshot < 0 ? n + c.norm.snapshot : c.norm.snapshot;
        if (k < 0 || k >= n) throw ValidationError("snapshot index out of range for " + file);
        const NormResult r = k_norm(GridFunction{s.grid, s.snapshots[k]}, w, options);
        values.push_back(r.value);
        divergence = divergence || r.divergence_warning;
        if (!r.warning.empty()) warning = r.warning;
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    Json report = {{"value", mean}, {"values", values}, {"divergence_warning", divergence}, {"warning", warning}};
    if (values.size() > 1) {
        double s = 0.0;
        for (double v : values) s += (v - mean) * (v - mean);
        report["standard_error"] = std::sqrt(s / static_cast<double>(values.size() - 1) / values.size());
    }
    out << report.dump(2) << "\n";
    write_json_file(out_path(c, "norm.json"), report);
    write_manifest(c);
    return kExitOk;
}

int run_sweep(const Common& common, std::ostream& out) {
    const RunConfig c = resolve(common, "sweep");
    SweepOptions so;
    so.estimate = c.estimate_options();
    so.levels = c.sweep.levels;
    so.dilate = c.sweep.dilate;
    so.refine_angle = c.sweep.refine_angle;
    const SweepResult result = theta_sweep(c.problem, c.sweep.Theta, c.sweep.thetas, c.sweep.p, so);
    const std::string csv = sweep_csv(result);
    write_text_file(out_path(c, "sweep.csv"), csv);
    Json rows = Json::array();
    for (std::size_t i = 0; i < result.reports.size(); ++i) {
        Json levels = Json::array();
        for (const auto& r : result.reports[i]) levels.push_back(to_json(r));
        rows.push_back({{"theta", c.sweep.thetas[i]},
                        {"classification", to_string(result.classification[i])},
                        {"growth", result.growth[i]},
                        {"levels", levels}});
    }
    write_json_file(out_path(c, "sweep.json"), {{"Theta", c.sweep.Theta}, {"p", c.sweep.p}, {"thetas", rows}});
    write_manifest(c);
    out << csv;
    return kExitOk;
}

int run_decay(const Common& common, std::ostream& out) {
    const RunConfig c = resolve(common, "decay");
    const ProblemSpec spec = c.problem_for_trial(0);
    const WienerPath path = sample_wiener(c.seed, spec.noise.K(), spec.n_steps(), spec.dt, 0);
    const DecayFit fit = decay_fit(spec, path, c.solver, c.decay_direction, c.weights.front(), c.decay);
    Json report = to_json(fit);
    if (const auto* w = std::get_if<WedgeDomain>(&spec.domain)) report["pi_over_kappa"] = kPi / w->kappa();
    write_json_file(out_path(c, "decay.json"), report);
    write_manifest(c);
    out << report.dump(2) << "\n";
    return kExitOk;
}

int run_holder(const Common& common, std::ostream& out) {
    const RunConfig c = resolve(common, "holder");
    const HolderReport r = time_holder_check(c.problem_for_trial(0), c.weights.front(), c.holder);
    const Json report = to_json(r);
    write_json_file(out_path(c, "holder.json"), report);
    write_manifest(c);
    out << report.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty() || std::find(kCommands.begin(), kCommands.end(), args[0]) == kCommands.end()) {
        if (!args.empty() && (args[0] == "--help" || args[0] == "-h")) {
            out << kUsage;
            return kExitOk;
        }
        if (!args.empty()) err << "unknown subcommand: " << args[0] << "\n";
        err << kUsage;
        return kExitUsage;
    }
    const std::string command = args[0];
    CLI::App app{"conic_spde " + command, "conic_spde " + command};
    Common common;

    // exponents
    std::string kappa_text, alpha_text, cap_text;
    double p = 2, a = 1, b = 0, cc = 1, nu1 = 1, nu2 = 1, theta = 2, Theta = 2, max_radius = 0;
    int d = 2, m = 0, snapshot = -1;
    std::vector<std::pair<CLI::Option*, double*>> numeric;
    std::vector<std::pair<CLI::Option*, std::string*>> angles;
    CLI::Option* d_opt = nullptr;
    // simulate
    std::string format, engine;
    CLI::Option *format_opt = nullptr, *engine_opt = nullptr;
    // norm
    std::vector<std::string> inputs;
    CLI::Option *inputs_opt = nullptr, *snapshot_opt = nullptr, *m_opt = nullptr, *radius_opt = nullptr;

    if (command == "exponents") {
        add_common(app, common, false);
        angles.emplace_back(app.add_option("--kappa", kappa_text, "wedge opening angle (radians or e.g. 3pi/2)"),
                            &kappa_text);
        angles.emplace_back(app.add_option("--alpha", alpha_text, "angle of the first edge"), &alpha_text);
        angles.emplace_back(app.add_option("--cap-angle", cap_text, "cap half-angle for d >= 3"), &cap_text);
        numeric.emplace_back(app.add_option("--p", p, "summability exponent"), &p);
        numeric.emplace_back(app.add_option("--a", a, "operator coefficient a (D11)"), &a);
        numeric.emplace_back(app.add_option("--b", b, "operator coefficient b (D12 + D21)"), &b);
        numeric.emplace_back(app.add_option("--c", cc, "operator coefficient c (D22)"), &cc);
        numeric.emplace_back(app.add_option("--nu1", nu1, "lower ellipticity bound"), &nu1);
        numeric.emplace_back(app.add_option("--nu2", nu2, "upper ellipticity bound"), &nu2);
        d_opt = app.add_option("--d", d, "dimension");
    } else if (command == "simulate") {
        add_common(app, common, true);
        format_opt = app.add_option("--format", format, "snapshot format: csv (x1,x2,u per snapshot) or binary");
        engine_opt = app.add_option("--engine", engine, "fd or representation");
    } else if (command == "norm") {
        add_common(app, common, false);
        inputs_opt = app.add_option("--input", inputs, "binary snapshot files (one per trial)");
        snapshot_opt = app.add_option("--snapshot", snapshot, "snapshot index, negative from the end");
        numeric.emplace_back(app.add_option("--p", p, "summability exponent"), &p);
        numeric.emplace_back(app.add_option("--theta", theta, "vertex weight exponent"), &theta);
        numeric.emplace_back(app.add_option("--Theta", Theta, "boundary weight exponent"), &Theta);
        m_opt = app.add_option("--m", m, "derivative order 0..2");
        radius_opt = app.add_option("--max-radius", max_radius, "integrate over |x| <= radius");
    } else if (command == "sweep") {
        add_common(app, common, true);
        app.footer("CSV columns: theta,Theta,level,lhs,rhs,ratio,stderr,classification");
    } else {
        add_common(app, common, command != "decay");
    }

    std::vector<std::string> rest(args.begin() + 1, args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return kExitValidation;
    }

    try {
        if (command == "exponents") return run_exponents(common, numeric, angles, d_opt, d, out);
        if (command == "kernel-verify") return run_kernel_verify(common, out);
        if (command == "simulate") return run_simulate(common, format, format_opt, engine, engine_opt, out);
        if (command == "norm")
            return run_norm(common, inputs, inputs_opt, snapshot, snapshot_opt, numeric, m, m_opt, max_radius,
                            radius_opt, out);
        if (command == "sweep") return run_sweep(common, out);
        if (command == "decay") return run_decay(common, out);
        return run_holder(common, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace conic
