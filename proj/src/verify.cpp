#include "conic_spde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "conic_spde/errors.hpp"
#include "conic_spde/rng.hpp"

namespace conic {

namespace {

constexpr std::uint32_t kHolderStream = 0x686f6c64;

double resolve_radius(const Grid& grid, double max_radius) {
    if (max_radius > 0) return max_radius;
    if (const auto* g = std::get_if<PolarGrid>(&grid)) return 0.5 * g->domain.r_max();
    return std::numeric_limits<double>::infinity();
}

double resolve_radius(const Domain& domain, double max_radius) {
    if (max_radius > 0) return max_radius;
    if (const auto* w = std::get_if<WedgeDomain>(&domain)) return 0.5 * w->r_max();
    return std::numeric_limits<double>::infinity();
}

// Runs body(i) for i in [0, n) on up to `threads` workers; the first
// exception is rethrown after all workers finish.
template <class F>
void parallel_for(int n, int threads, F&& body) {
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr error;
    std::mutex mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<double> trapezoid_weights(const std::vector<double>& times) {
    std::vector<double> w(times.size(), 0.0);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double h = times[k + 1] - times[k];
        w[k] += 0.5 * h;
        w[k + 1] += 0.5 * h;
    }
    return w;
}

struct CellSet {
    std::vector<Cell> cells;
    std::vector<unsigned char> active;
};

CellSet active_cells(const Grid& grid, double radius) {
    CellSet set{quadrature_cells(grid), {}};
    for (const Cell& c : set.cells) set.active.push_back(norm(c.center) <= radius);
    return set;
}

double cell_weight(const Cell& c, const WeightParams& w) {
    return std::pow(c.rho_vertex, w.theta - w.Theta) * std::pow(c.rho, w.Theta - 2.0) * c.area;
}

// Time-integrated |u / rho|^p + |grad u|^p per cell.
std::vector<double> lhs_density(const SolutionPath& path, const CellSet& set, double p) {
    const std::vector<double> tw = trapezoid_weights(path.times);
    std::vector<double> density(set.cells.size(), 0.0);
    for (std::size_t k = 0; k < path.snapshots.size(); ++k) {
        if (tw[k] == 0.0) continue;
        const CellValues cv = cell_values(*path.grid, set.cells, path.snapshots[k]);
        for (std::size_t c = 0; c < set.cells.size(); ++c) {
            if (!set.active[c]) continue;
            const double v = std::abs(cv.value[c] / set.cells[c].rho);
            const double g = std::hypot(cv.grad_x[c], cv.grad_y[c]);
            density[c] += tw[k] * (std::pow(v, p) + std::pow(g, p));
        }
    }
    return density;
}

std::vector<double> rhs_density(const ProblemSpec& spec, const std::vector<double>& times, const CellSet& set,
                                double p) {
    const std::vector<double> tw = trapezoid_weights(times);
    std::vector<double> density(set.cells.size(), 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (tw[k] == 0.0) continue;
        const double t = times[k];
        for (std::size_t c = 0; c < set.cells.size(); ++c) {
            if (!set.active[c]) continue;
            const Point x = set.cells[c].center;
            double g2 = 0.0;
            for (const auto& field : spec.noise.fields) {
                const double g = field(t, x);
                g2 += g * g;
            }
            const Point f = spec.f(t, x);
            density[c] += tw[k] * (std::pow(std::abs(set.cells[c].rho * spec.f0(t, x)), p) + std::pow(std::abs(f.x), p) +
                                   std::pow(std::abs(f.y), p) + std::pow(g2, 0.5 * p));
        }
    }
    return density;
}

double weighted_total(const CellSet& set, const std::vector<double>& density, const WeightParams& w) {
    double total = 0.0;
    for (std::size_t c = 0; c < set.cells.size(); ++c)
        if (set.active[c] && density[c] != 0.0) total += density[c] * cell_weight(set.cells[c], w);
    return total;
}

std::string divergence_message(const CellSet& set, const std::vector<double>& density, const WeightParams& w) {
    bool boundary = false, vertex = false;
    for (std::size_t c = 0; c < set.cells.size(); ++c) {
        if (!set.active[c] || density[c] == 0.0) continue;
        boundary = boundary || set.cells[c].touches_boundary;
        vertex = vertex || set.cells[c].touches_vertex;
    }
    std::string msg;
    if (w.Theta - 2.0 <= -1.0 && boundary) msg = "Theta - d <= -1: boundary weight is not integrable";
    if (w.theta <= 0.0 && vertex)
        msg += std::string(msg.empty() ? "" : "; ") + "theta <= 0: vertex weight is not integrable";
    return msg;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

CoefficientPath rescale_time(const CoefficientPath& path, double factor) {
    switch (path.kind()) {
        case CoefficientKind::constant: return path;
        case CoefficientKind::piecewise_constant_random: {
            std::vector<double> times = path.switch_times();
            for (double& t : times) t *= factor;
            return CoefficientPath::piecewise(times, path.segments(), path.nu1(), path.nu2());
        }
        case CoefficientKind::oscillating:
            return CoefficientPath::oscillating(path.nu1(), path.nu2(), path.omega() / factor, path.direction());
    }
    return path;
}

ScalarField rescale_field(const ScalarField& field, double s, double amplitude_factor) {
    ScalarField out = field.dilated(s, amplitude_factor);
    for (auto& b : out.bumps) b.omega /= s * s;
    return out;
}

}  // namespace

double lhs_integral(const SolutionPath& path, const WeightParams& w, double max_radius) {
    w.validate();
    const CellSet set = active_cells(*path.grid, resolve_radius(*path.grid, max_radius));
    return weighted_total(set, lhs_density(path, set, w.p), w);
}

double rhs_integral(const ProblemSpec& spec, const Grid& grid, const std::vector<double>& times, const WeightParams& w,
                    double max_radius) {
    w.validate();
    const CellSet set = active_cells(grid, resolve_radius(grid, max_radius));
    return weighted_total(set, rhs_density(spec, times, set, w.p), w);
}

std::vector<EstimateReport> estimate_ratio(const ProblemSpec& spec, const std::vector<WeightParams>& weights,
                                           const EstimateOptions& options) {
    require(options.trials >= 1, "trials must be >= 1");
    require(!weights.empty(), "at least one weight is needed");
    for (const auto& w : weights) w.validate();
    spec.validate();
    const auto grid = make_grid(spec.domain, options.solver.grid);
    const CellSet set = active_cells(*grid, resolve_radius(spec.domain, options.max_radius));

    std::vector<double> powers;
    for (const auto& w : weights)
        if (std::find(powers.begin(), powers.end(), w.p) == powers.end()) powers.push_back(w.p);

    // lhs[trial][weight]
    std::vector<std::vector<double>> lhs(options.trials, std::vector<double>(weights.size(), 0.0));
    std::vector<double> times;
    parallel_for(options.trials, options.threads, [&](int trial) {
        const WienerPath path =
            sample_wiener(options.seed, spec.noise.K(), spec.n_steps(), spec.dt, static_cast<std::uint32_t>(trial));
        ProblemSpec local = spec;
        if (const auto& m = options.random_coefficients)
            local.coefficients = sample_coefficients(options.seed, m->kind, m->nu1, m->nu2, spec.T, m->n_switches,
                                                     static_cast<std::uint32_t>(trial));
        const SolutionPath solution = solve_fd(local, path, options.solver);
        std::vector<std::vector<double>> densities;
        for (double p : powers) densities.push_back(lhs_density(solution, set, p));
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const auto k = std::find(powers.begin(), powers.end(), weights[i].p) - powers.begin();
            lhs[trial][i] = weighted_total(set, densities[k], weights[i]);
        }
        if (trial == 0) times = solution.times;
    });

    std::vector<EstimateReport> reports;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const WeightParams& w = weights[i];
        EstimateReport r;
        r.weights = w;
        r.trials = options.trials;
        r.level = options.level;
        for (int t = 0; t < options.trials; ++t) r.trial_lhs.push_back(lhs[t][i]);
        r.lhs = mean(r.trial_lhs);
        r.lhs_stderr = standard_error(r.trial_lhs);
        const std::vector<double> rd = rhs_density(spec, times, set, w.p);
        r.rhs = weighted_total(set, rd, w);
        // data are deterministic, so the rhs carries no sampling error
        r.rhs_stderr = 0.0;
        r.zero_data = r.lhs == 0.0 && r.rhs == 0.0;
        r.ratio_undefined = r.rhs == 0.0 && r.lhs > 0.0;
        if (r.rhs > 0.0) {
            r.ratio = r.lhs / r.rhs;
            r.ratio_stderr = r.lhs_stderr / r.rhs;
        }
        // the solution itself vanishes at the vertex and edges; only data can make the weighted integrals diverge
        r.warning = divergence_message(set, rd, w);
        r.divergence_warning = !r.warning.empty();
        reports.push_back(r);
    }
    return reports;
}

EstimateReport estimate_ratio(const ProblemSpec& spec, const WeightParams& w, const EstimateOptions& options) {
    return estimate_ratio(spec, std::vector<WeightParams>{w}, options).front();
}

std::string to_string(Classification c) {
    switch (c) {
        case Classification::stable: return "STABLE";
        case Classification::growing: return "GROWING";
        case Classification::indeterminate: return "INDETERMINATE";
    }
    return "INDETERMINATE";
}

Classification classify_growth(const std::vector<double>& ratios) {
    require(ratios.size() >= 2, "classification needs at least two levels");
    std::vector<double> growth;
    for (std::size_t l = 0; l + 1 < ratios.size(); ++l) {
        if (!(ratios[l] > 0) || !std::isfinite(ratios[l + 1])) return Classification::indeterminate;
        growth.push_back(ratios[l + 1] / ratios[l]);
    }
    if (growth.size() >= 3 && std::all_of(growth.end() - 3, growth.end(), [](double g) { return g >= 2.0; }))
        return Classification::growing;
    if (std::all_of(growth.begin(), growth.end(), [](double g) { return g < 2.0 && g > 0.5; }))
        return Classification::stable;
    return Classification::indeterminate;
}

ProblemSpec dilate_problem(const ProblemSpec& spec, int level) {
    require(level >= 0, "level must be >= 0");
    const double s = std::ldexp(1.0, -level), s2 = s * s;
    ProblemSpec out = spec;
    if (const auto* w = std::get_if<WedgeDomain>(&spec.domain)) {
        out.domain = WedgeDomain(w->kappa(), w->alpha(), w->r_max() * s);
    } else {
        std::vector<Point> v = std::get<PolygonDomain>(spec.domain).vertices();
        for (Point& p : v) p = s * p;
        out.domain = PolygonDomain(v);
    }
    // u_s(t, x) = u(t / s^2, x / s) solves the problem with these data
    out.u0 = rescale_field(spec.u0, s, 1.0);
    out.f0 = rescale_field(spec.f0, s, 1.0 / s2);
    out.f.x = rescale_field(spec.f.x, s, 1.0 / s);
    out.f.y = rescale_field(spec.f.y, s, 1.0 / s);
    for (auto& g : out.noise.fields) g = rescale_field(g, s, 1.0 / s);
    out.T = spec.T * s2;
    out.dt = spec.dt * s2;
    out.coefficients = rescale_time(spec.coefficients, s2);
    return out;
}

SweepResult theta_sweep(const ProblemSpec& spec, double Theta, const std::vector<double>& theta_list, double p,
                        const SweepOptions& options) {
    require(options.levels >= 2, "sweep needs at least two levels");
    require(!theta_list.empty(), "theta list is empty");
    std::vector<WeightParams> weights;
    for (double theta : theta_list) weights.push_back({p, theta, Theta, 0});
    SweepResult result;
    result.reports.assign(theta_list.size(), {});
    for (int level = 0; level < options.levels; ++level) {
        const ProblemSpec local = options.dilate ? dilate_problem(spec, level) : spec;
        EstimateOptions est = options.estimate;
        est.level = level;
        est.solver.grid.n_r <<= level;
        if (options.refine_angle) est.solver.grid.n_eta <<= level;
        est.solver.grid.h = std::ldexp(est.solver.grid.h, -2 * level);
        if (options.estimate.max_radius > 0 && options.dilate)
            est.max_radius = std::ldexp(options.estimate.max_radius, -level);
        const auto reports = estimate_ratio(local, weights, est);
        for (std::size_t i = 0; i < reports.size(); ++i) result.reports[i].push_back(reports[i]);
    }
    for (const auto& row : result.reports) {
        std::vector<double> ratios, growth;
        for (const auto& r : row) ratios.push_back(r.ratio);
        for (std::size_t l = 0; l + 1 < ratios.size(); ++l)
            growth.push_back(ratios[l] > 0 ? ratios[l + 1] / ratios[l] : 0.0);
        result.classification.push_back(classify_growth(ratios));
        result.growth.push_back(growth);
    }
    return result;
}

std::string to_string(DecayDirection d) { return d == DecayDirection::vertex ? "vertex" : "edge"; }

DecayDirection decay_direction_from_string(const std::string& name) {
    if (name == "vertex") return DecayDirection::vertex;
    if (name == "edge") return DecayDirection::edge;
    throw ValidationError("unknown decay direction: " + name);
}

DecayFit decay_fit(const GridFunction& u, DecayDirection direction, const WeightParams& w,
                   const DecayOptions& options) {
    w.validate();
    const auto* g = std::get_if<PolarGrid>(u.grid.get());
    if (!g) throw ValidationError("decay fits need a polar (wedge) grid");
    DecayFit fit;
    fit.direction = direction;
    std::vector<double> xs, ys;
    double lo = options.window_lo, hi = options.window_hi;
    auto add = [&](double coord, double value) {
        if (coord < lo || coord > hi) return;
        if (std::abs(value) < 1e-13) {
            fit.underflow = true;
            return;
        }
        xs.push_back(std::log(coord));
        ys.push_back(std::log(std::abs(value)));
    };
    if (direction == DecayDirection::vertex) {
        require(g->n_eta() % 2 == 0, "vertex fits need an even n_eta so a node row lies on the bisector");
        const int j = g->n_eta() / 2;
        if (hi <= lo) {
            lo = g->r.front();
            hi = g->domain.r_max() / 8;
        }
        for (int i = 0; i < g->n_r(); ++i) add(g->r[i], u.values[g->index(i, j)]);
        fit.guarantee = 1.0 - w.theta / w.p;
    } else {
        const double radius = options.edge_radius > 0 ? options.edge_radius : 0.25 * g->domain.r_max();
        int i = 0;
        for (int k = 1; k < g->n_r(); ++k)
            if (std::abs(g->r[k] - radius) < std::abs(g->r[i] - radius)) i = k;
        const double r = g->r[i];
        if (hi <= lo) {
            lo = 0.0;
            hi = r * std::sin(std::min(g->domain.kappa() / 8, kPi / 8));
        }
        for (int j = 1; 2 * j <= g->n_eta(); ++j)
            add(g->domain.rho_local(r, g->eta[j]), u.values[g->index(i, j)]);
        fit.guarantee = 1.0 - w.Theta / w.p;
    }
    fit.points = static_cast<int>(xs.size());
    if (fit.points < 3) throw NumericalError("decay fit window holds fewer than 3 usable points");
    fit.window_lo = std::exp(*std::min_element(xs.begin(), xs.end()));
    fit.window_hi = std::exp(*std::max_element(xs.begin(), xs.end()));
    const double mx = mean(xs), my = mean(ys);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
        syy += (ys[k] - my) * (ys[k] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    fit.pass = fit.slope >= fit.guarantee - options.tolerance;
    return fit;
}

DecayFit decay_fit(const ProblemSpec& spec, const WienerPath& path, const SolverOptions& solver,
                   DecayDirection direction, const WeightParams& w, const DecayOptions& options) {
    const auto* dom = std::get_if<WedgeDomain>(&spec.domain);
    if (!dom) throw ValidationError("decay fits need a wedge domain");
    std::vector<const ScalarField*> fields = {&spec.u0, &spec.f0, &spec.f.x, &spec.f.y};
    for (const auto& g : spec.noise.fields) fields.push_back(&g);
    DecayOptions opts = options;
    if (direction == DecayDirection::vertex) {
        double nearest = dom->r_max() / 8;
        for (const auto* f : fields)
            for (const auto& b : f->bumps) nearest = std::min(nearest, norm(b.center) - b.width);
        if (opts.window_hi <= opts.window_lo) {
            opts.window_lo = 0.0;
            opts.window_hi = 0.5 * nearest;
        }
        if (opts.window_hi >= nearest) throw ValidationError("vertex fit window overlaps the data support");
    } else {
        const double radius = opts.edge_radius > 0 ? opts.edge_radius : 0.25 * dom->r_max();
        opts.edge_radius = radius;
        if (opts.window_hi <= opts.window_lo) {
            opts.window_lo = 0.0;
            opts.window_hi = radius * std::sin(std::min(dom->kappa() / 8, kPi / 8));
        }
        // the arc segment near the eta = 0 edge must stay outside every support
        for (const auto* f : fields)
            for (const auto& b : f->bumps)
                for (int k = 0; k <= 64; ++k) {
                    const double eta = std::asin(std::min(1.0, opts.window_hi / radius)) * k / 64;
                    if (norm(dom->from_local(radius, eta) - b.center) < b.width)
                        throw ValidationError("edge fit window overlaps the data support");
                }
    }
    const SolutionPath solution = solve_fd(spec, path, solver);
    return decay_fit(solution.snapshot(solution.snapshots.size() - 1), direction, w, opts);
}

double holder_max_quotient(const SolutionPath& path, const WeightParams& w, double alpha, double beta,
                           const std::vector<std::pair<int, int>>& pairs, double max_radius) {
    const double eta = beta - 1.0 + w.Theta / w.p;
    const double radius = resolve_radius(*path.grid, max_radius);
    const auto nodes = grid_nodes(*path.grid);
    const auto boundary = grid_boundary_mask(*path.grid);
    std::vector<std::size_t> index;
    std::vector<double> weight;
    const auto* pg = std::get_if<PolarGrid>(path.grid.get());
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (boundary[n] || norm(nodes[n]) > radius) continue;
        double rb, rv;
        if (pg) {
            rb = pg->domain.rho(nodes[n]);
            rv = pg->domain.rho_vertex(nodes[n]);
        } else {
            const auto& cg = std::get<CartesianGrid>(*path.grid);
            rb = cg.domain.rho(nodes[n]);
            rv = cg.domain.rho_vertex(nodes[n]);
        }
        index.push_back(n);
        weight.push_back(std::pow(rb, eta) * std::pow(rv, (w.theta - w.Theta) / w.p));
    }
    double best = 0.0;
    for (const auto& [a, b] : pairs) {
        const auto& ua = path.snapshots[a];
        const auto& ub = path.snapshots[b];
        double q = 0.0;
        for (std::size_t k = 0; k < index.size(); ++k) q = std::max(q, weight[k] * std::abs(ua[index[k]] - ub[index[k]]));
        const double gap = std::abs(path.times[a] - path.times[b]);
        best = std::max(best, std::pow(q, w.p) / std::pow(gap, w.p * alpha / 2 - 1));
    }
    return best;
}

HolderReport time_holder_check(const ProblemSpec& spec, const WeightParams& w, const HolderOptions& options) {
    w.validate();
    if (!(2.0 / w.p < options.alpha && options.alpha < options.beta && options.beta <= 1.0))
        throw ValidationError("empty Holder window: need 2/p < alpha < beta <= 1, and p = 2 gives 2/p = 1 >= beta; "
                              "use p >= 4");
    require(options.pairs >= 1 && options.trials >= 1, "pairs and trials must be >= 1");
    HolderReport report;
    report.eta = options.beta - 1.0 + w.Theta / w.p;
    std::vector<double> single(options.trials), doubled(options.trials);
    parallel_for(options.trials, options.threads, [&](int trial) {
        const WienerPath path =
            sample_wiener(options.seed, spec.noise.K(), spec.n_steps(), spec.dt, static_cast<std::uint32_t>(trial));
        const SolutionPath solution = solve_fd(spec, path, options.solver);
        const int n = static_cast<int>(solution.snapshots.size());
        require(n >= 2, "Holder check needs at least two snapshots");
        RandomStream stream(options.seed, kHolderStream, static_cast<std::uint32_t>(trial));
        std::vector<std::pair<int, int>> pairs;
        while (static_cast<int>(pairs.size()) < 2 * options.pairs) {
            const int a = std::min(n - 1, static_cast<int>(stream.uniform() * n));
            const int b = std::min(n - 1, static_cast<int>(stream.uniform() * n));
            if (a != b) pairs.emplace_back(a, b);
        }
        const std::vector<std::pair<int, int>> head(pairs.begin(), pairs.begin() + options.pairs);
        single[trial] = holder_max_quotient(solution, w, options.alpha, options.beta, head, options.max_radius);
        doubled[trial] = holder_max_quotient(solution, w, options.alpha, options.beta, pairs, options.max_radius);
    });
    report.trial_max = doubled;
    report.max_quotient = mean(single);
    report.max_quotient_doubled = mean(doubled);
    report.relative_change =
        report.max_quotient > 0 ? report.max_quotient_doubled / report.max_quotient - 1.0 : 0.0;
    report.finite = std::isfinite(report.max_quotient_doubled);
    report.stable = report.finite && report.relative_change < 0.2;
    return report;
}

}  // namespace conic
