#include "conic_spde/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "conic_spde/errors.hpp"

namespace conic {

int ProblemSpec::n_steps() const {
    return static_cast<int>(std::llround(T / dt));
}

void ProblemSpec::validate() const {
    require(T > 0 && dt > 0, "T and dt must be positive");
    const int n = n_steps();
    require(n >= 1 && std::abs(n * dt - T) <= 1e-9 * T, "T must be an integer multiple of dt");
    for (const ScalarField* field : {&f0, &f.x, &f.y, &u0}) validate_support(*field, domain);
    for (const auto& g : noise.fields) validate_support(g, domain);
}

ProblemSpec combine(double c1, const ProblemSpec& a, double c2, const ProblemSpec& b) {
    ProblemSpec out = a;
    out.f0 = combine(c1, a.f0, c2, b.f0);
    out.f.x = combine(c1, a.f.x, c2, b.f.x);
    out.f.y = combine(c1, a.f.y, c2, b.f.y);
    out.u0 = combine(c1, a.u0, c2, b.u0);
    const int K = std::max(a.noise.K(), b.noise.K());
    out.noise.fields.assign(K, ScalarField{});
    for (int k = 0; k < K; ++k) {
        const ScalarField empty;
        out.noise.fields[k] = combine(c1, k < a.noise.K() ? a.noise.fields[k] : empty, c2,
                                      k < b.noise.K() ? b.noise.fields[k] : empty);
    }
    return out;
}

std::shared_ptr<const Grid> make_grid(const Domain& domain, const GridSpec& spec) {
    if (const auto* w = std::get_if<WedgeDomain>(&domain))
        return std::make_shared<const Grid>(build_polar_grid(*w, spec.n_r, spec.n_eta, spec.grading));
    return std::make_shared<const Grid>(build_cartesian_grid(std::get<PolygonDomain>(domain), spec.h));
}

std::string to_string(Scheme scheme) {
    return scheme == Scheme::semi_implicit ? "semi-implicit" : "explicit";
}

Scheme scheme_from_string(const std::string& name) {
    if (name == "semi-implicit") return Scheme::semi_implicit;
    if (name == "explicit") return Scheme::explicit_euler;
    throw ValidationError("unknown scheme '" + name + "'");
}

std::string to_string(Engine engine) {
    return engine == Engine::fd ? "fd" : "representation";
}

Engine engine_from_string(const std::string& name) {
    if (name == "fd") return Engine::fd;
    if (name == "representation") return Engine::representation;
    throw ValidationError("unknown engine '" + name + "'");
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

// Node values of every bump, so that a field at time t is a sum of
// time-factor-weighted arrays.
struct NodalField {
    std::vector<Bump> bumps;
    std::vector<std::vector<double>> values;

    void accumulate(double t, double scale, std::vector<double>& out) const {
        for (std::size_t b = 0; b < bumps.size(); ++b) {
            const double factor = scale * bumps[b].time_factor(t);
            if (factor == 0.0) continue;
            const auto& v = values[b];
            for (std::size_t n = 0; n < out.size(); ++n) out[n] += factor * v[n];
        }
    }
};

NodalField sample_field(const ScalarField& field, const std::vector<Point>& nodes) {
    NodalField out;
    for (const auto& bump : field.bumps) {
        std::vector<double> v(nodes.size());
        for (std::size_t n = 0; n < nodes.size(); ++n) v[n] = bump.spatial(nodes[n]);
        out.bumps.push_back(bump);
        out.values.push_back(std::move(v));
    }
    return out;
}

// Centred conservative divergence of the nodal vector field (fx, fy).
std::vector<double> discrete_divergence(const Grid& grid, const std::vector<double>& fx,
                                        const std::vector<double>& fy) {
    std::vector<double> div(fx.size(), 0.0);
    if (const auto* g = std::get_if<PolarGrid>(&grid)) {
        const double alpha = g->domain.alpha(), de = g->eta[1] - g->eta[0];
        auto radial = [&](int i, int j) {
            if (i < 0) return 0.0;  // r f_r vanishes at the vertex
            const std::size_t k = g->index(i, j);
            const double phi = g->eta[j] + alpha;
            return g->r[i] * (fx[k] * std::cos(phi) + fy[k] * std::sin(phi));
        };
        auto angular = [&](int i, int j) {
            const std::size_t k = g->index(i, j);
            const double phi = g->eta[j] + alpha;
            return -fx[k] * std::sin(phi) + fy[k] * std::cos(phi);
        };
        for (int i = 0; i + 1 < g->n_r(); ++i)
            for (int j = 1; j < g->n_eta(); ++j) {
                const double r0 = g->r[i];
                const double dr = g->r[i + 1] - g->r_below(i);
                div[g->index(i, j)] = (radial(i + 1, j) - radial(i - 1, j)) / (r0 * dr) +
                                      (angular(i, j + 1) - angular(i, j - 1)) / (2.0 * r0 * de);
            }
    } else {
        const auto& cg = std::get<CartesianGrid>(grid);
        for (int j = 1; j < cg.ny; ++j)
            for (int i = 1; i < cg.nx; ++i) {
                if (!cg.is_interior(i, j)) continue;
                div[cg.index(i, j)] = (fx[cg.index(i + 1, j)] - fx[cg.index(i - 1, j)] + fy[cg.index(i, j + 1)] -
                                       fy[cg.index(i, j - 1)]) /
                                      (2.0 * cg.h);
            }
    }
    return div;
}

NodalField sample_divergence(const VectorField& f, const Grid& grid, const std::vector<Point>& nodes) {
    NodalField out;
    const std::vector<double> zero(nodes.size(), 0.0);
    for (int component = 0; component < 2; ++component) {
        const ScalarField& field = component == 0 ? f.x : f.y;
        for (const auto& bump : field.bumps) {
            std::vector<double> v(nodes.size());
            for (std::size_t n = 0; n < nodes.size(); ++n) v[n] = bump.spatial(nodes[n]);
            out.bumps.push_back(bump);
            out.values.push_back(component == 0 ? discrete_divergence(grid, v, zero)
                                                : discrete_divergence(grid, zero, v));
        }
    }
    return out;
}

void assemble_polar(const PolarGrid& g, const Matrix2& a, Triplets& t) {
    const double de = g.eta[1] - g.eta[0], alpha = g.domain.alpha();
    for (int i = 0; i + 1 < g.n_r(); ++i) {
        const double r0 = g.r[i], rm = g.r_below(i), rp = g.r[i + 1];
        const double hm = r0 - rm, hp = rp - r0;
        const double d1[3] = {-hp / (hm * (hm + hp)), (hp - hm) / (hm * hp), hm / (hp * (hm + hp))};
        const double d2[3] = {2.0 / (hm * (hm + hp)), -2.0 / (hm * hp), 2.0 / (hp * (hm + hp))};
        for (int j = 1; j < g.n_eta(); ++j) {
            const double phi = g.eta[j] + alpha;
            const double c = std::cos(phi), s = std::sin(phi);
            const double c_rr = a.a11 * c * c + 2.0 * a.a12 * s * c + a.a22 * s * s;
            const double tangential = a.a11 * s * s - 2.0 * a.a12 * s * c + a.a22 * c * c;
            const double skew = -2.0 * s * c * a.a11 + 2.0 * a.a12 * (c * c - s * s) + 2.0 * s * c * a.a22;
            const double c_re = skew / r0;
            const double c_r = tangential / r0;
            const double c_e = -skew / (r0 * r0);
            const double c_ee = tangential / (r0 * r0);
            const auto row = static_cast<int>(g.index(i, j));
            auto add = [&](int ii, int jj, double v) {
                if (ii < 0 || v == 0.0) return;  // vertex ghost value is zero
                t.emplace_back(row, static_cast<int>(g.index(ii, jj)), v);
            };
            for (int k = 0; k < 3; ++k) add(i - 1 + k, j, c_rr * d2[k] + c_r * d1[k]);
            add(i, j, -2.0 * c_ee / (de * de));
            add(i, j + 1, c_ee / (de * de) + c_e / (2.0 * de));
            add(i, j - 1, c_ee / (de * de) - c_e / (2.0 * de));
            for (int k = 0; k < 3; ++k) {
                add(i - 1 + k, j + 1, c_re * d1[k] / (2.0 * de));
                add(i - 1 + k, j - 1, -c_re * d1[k] / (2.0 * de));
            }
        }
    }
}

void assemble_cartesian(const CartesianGrid& g, const Matrix2& a, Triplets& t) {
    const double h2 = g.h * g.h;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            if (!g.is_interior(i, j)) continue;
            const auto row = static_cast<int>(g.index(i, j));
            auto add = [&](int ii, int jj, double v) {
                if (v == 0.0 || !g.is_interior(ii, jj)) return;
                t.emplace_back(row, static_cast<int>(g.index(ii, jj)), v);
            };
            add(i, j, -2.0 * (a.a11 + a.a22) / h2);
            add(i + 1, j, a.a11 / h2);
            add(i - 1, j, a.a11 / h2);
            add(i, j + 1, a.a22 / h2);
            add(i, j - 1, a.a22 / h2);
            const double cross = 2.0 * a.a12 / (4.0 * h2);
            add(i + 1, j + 1, cross);
            add(i - 1, j - 1, cross);
            add(i + 1, j - 1, -cross);
            add(i - 1, j + 1, -cross);
        }
}

SparseMatrix assemble_operator(const Grid& grid, const Matrix2& a) {
    Triplets t;
    if (const auto* g = std::get_if<PolarGrid>(&grid))
        assemble_polar(*g, a, t);
    else
        assemble_cartesian(std::get<CartesianGrid>(grid), a, t);
    const auto n = static_cast<int>(grid_size(grid));
    SparseMatrix A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

double min_spacing(const Grid& grid) {
    if (const auto* g = std::get_if<PolarGrid>(&grid)) {
        double h = g->r[0] * (g->eta[1] - g->eta[0]);
        for (int i = 0; i < g->n_r(); ++i) h = std::min(h, g->r[i] - g->r_below(i));
        return h;
    }
    return std::get<CartesianGrid>(grid).h;
}

}  // namespace

SolutionPath solve_fd(const ProblemSpec& spec, const WienerPath& path, const SolverOptions& options) {
    spec.validate();
    const int n_steps = spec.n_steps();
    require(path.n_steps == n_steps && std::abs(path.dt - spec.dt) <= 1e-12 * spec.dt,
            "Wiener path time grid does not match the problem");
    require(path.K >= spec.noise.K(), "Wiener path has fewer modes than the noise spec");
    require(options.snapshot_every >= 1 && options.snapshot_every <= 10, "snapshot spacing must be 1..10 steps");

    SolutionPath out;
    out.grid = make_grid(spec.domain, options.grid);
    out.wiener = path;
    out.coefficients = spec.coefficients;
    const Grid& grid = *out.grid;
    const std::vector<Point> nodes = grid_nodes(grid);
    const std::vector<unsigned char> boundary = grid_boundary_mask(grid);
    const std::size_t n = nodes.size();
    out.valid_radius = std::numeric_limits<double>::infinity();

    if (options.scheme == Scheme::explicit_euler) {
        const double h = min_spacing(grid);
        if (spec.dt > options.c_stab * h * h / spec.coefficients.nu2())
            throw ValidationError("explicit scheme unstable: dt exceeds c_stab h_min^2 / nu2 = " +
                                  std::to_string(options.c_stab * h * h / spec.coefficients.nu2()));
    }

    const NodalField f0 = sample_field(spec.f0, nodes);
    const NodalField div_f = sample_divergence(spec.f, grid, nodes);
    std::vector<NodalField> g;
    for (const auto& field : spec.noise.fields) g.push_back(sample_field(field, nodes));

    Eigen::VectorXd u(static_cast<Eigen::Index>(n));
    {
        std::vector<double> start(n, 0.0);
        sample_field(spec.u0, nodes).accumulate(0.0, 1.0, start);
        for (std::size_t k = 0; k < n; ++k) u[static_cast<Eigen::Index>(k)] = boundary[k] ? 0.0 : start[k];
    }
    auto store = [&](double t) {
        out.times.push_back(t);
        out.snapshots.emplace_back(u.data(), u.data() + u.size());
    };
    store(0.0);

    Matrix2 cached_a{0.0, 0.0, 0.0};
    bool have_operator = false;
    SparseMatrix A;
    Eigen::SparseLU<SparseMatrix> lu;
    std::vector<double> rhs(n);
    for (int step = 0; step < n_steps; ++step) {
        const double t = step * spec.dt;
        const Matrix2 a = spec.coefficients.at(t);
        if (!have_operator || !(a == cached_a)) {
            A = assemble_operator(grid, a);
            if (options.scheme == Scheme::semi_implicit) {
                SparseMatrix M(A.rows(), A.cols());
                M.setIdentity();
                M -= spec.dt * A;
                M.makeCompressed();
                lu.compute(M);
                if (lu.info() != Eigen::Success) throw NumericalError("sparse LU factorisation failed");
            }
            cached_a = a;
            have_operator = true;
        }
        std::fill(rhs.begin(), rhs.end(), 0.0);
        f0.accumulate(t, spec.dt, rhs);
        div_f.accumulate(t, spec.dt, rhs);
        for (int k = 0; k < spec.noise.K(); ++k) g[k].accumulate(t, path.dw(step, k), rhs);
        Eigen::Map<const Eigen::VectorXd> forcing(rhs.data(), static_cast<Eigen::Index>(n));
        if (options.scheme == Scheme::semi_implicit) {
            Eigen::VectorXd b = u + forcing;
            for (std::size_t k = 0; k < n; ++k)
                if (boundary[k]) b[static_cast<Eigen::Index>(k)] = 0.0;
            u = lu.solve(b);
            if (lu.info() != Eigen::Success) throw NumericalError("sparse LU solve failed");
        } else {
            u = u + spec.dt * (A * u) + forcing;
        }
        for (std::size_t k = 0; k < n; ++k)
            if (boundary[k]) u[static_cast<Eigen::Index>(k)] = 0.0;
        if (!u.allFinite()) throw NumericalError("solution became non-finite");
        if ((step + 1) % options.snapshot_every == 0 || step + 1 == n_steps) store((step + 1) * spec.dt);
    }
    return out;
}

LinearityReport pathwise_linearity_check(const ProblemSpec& d1, const ProblemSpec& d2, const WienerPath& path,
                                         double c1, double c2, Engine engine, const SolverOptions& fd_options,
                                         const RepresentationOptions& rep_options, double tolerance) {
    auto solve = [&](const ProblemSpec& spec) {
        return engine == Engine::fd ? solve_fd(spec, path, fd_options)
                                    : solve_representation(spec, path, rep_options);
    };
    const SolutionPath s1 = solve(d1), s2 = solve(d2), joint = solve(combine(c1, d1, c2, d2));
    LinearityReport report;
    for (std::size_t k = 0; k < joint.snapshots.size(); ++k)
        for (std::size_t m = 0; m < joint.snapshots[k].size(); ++m) {
            const double a = c1 * s1.snapshots[k][m], b = c2 * s2.snapshots[k][m];
            report.max_deviation = std::max(report.max_deviation, std::abs(joint.snapshots[k][m] - a - b));
            report.scale = std::max(report.scale, std::abs(a) + std::abs(b));
        }
    report.pass = report.max_deviation <= tolerance * std::max(1.0, report.scale);
    return report;
}

}  // namespace conic
