#include <algorithm>
#include <cmath>
#include <functional>

#include "conic_spde/bessel.hpp"
#include "conic_spde/errors.hpp"
#include "conic_spde/kernel.hpp"
#include "conic_spde/quadrature.hpp"
#include "conic_spde/solver.hpp"

namespace conic {

namespace {

// Terms with (r - r')^2 / 4 tau above this are below e^{-36} and skipped.
constexpr double kRadialCutoff = 36.0;

// Angular coefficients of one bump (or of a bump-derived profile) at the
// radial quadrature nodes: table[q * n_modes + (n - 1)].
struct CoefficientTable {
    Bump bump;
    std::vector<double> values;
};

struct AngularRule {
    QuadratureRule rule;
    int trusted_modes = 0;
};

AngularRule make_angular_rule(double kappa, double panel_width, double mu, int max_modes) {
    const int panels = std::max(4, static_cast<int>(std::ceil(kappa / panel_width)));
    AngularRule out{composite_gauss_legendre(0.0, kappa, panels, 20), 0};
    // 20-point panels integrate up to about three oscillations accurately
    out.trusted_modes = std::min(max_modes, static_cast<int>(20.0 / (mu * kappa / panels)));
    return out;
}

enum class Profile { value, radial_x, radial_y, angular_x, angular_y, dx, dy };

// Value of the profile whose angular transform is needed; `trig` selects the
// sin (false) or cos (true) transform.
double profile_value(const Bump& b, Profile kind, Point y, double phi) {
    switch (kind) {
        case Profile::value: return b.spatial(y);
        case Profile::radial_x: return b.spatial(y) * std::cos(phi);
        case Profile::radial_y: return b.spatial(y) * std::sin(phi);
        case Profile::angular_x: return -b.spatial(y) * std::sin(phi);
        case Profile::angular_y: return b.spatial(y) * std::cos(phi);
        case Profile::dx: return b.spatial_gradient(y).x;
        case Profile::dy: return b.spatial_gradient(y).y;
    }
    return 0.0;
}

CoefficientTable transform(const Bump& b, Profile kind, bool cosine, const WedgeDomain& w, const QuadratureRule& radial,
                           const AngularRule& angular, int n_modes) {
    const double mu = kPi / w.kappa();
    CoefficientTable out{b, std::vector<double>(radial.nodes.size() * n_modes, 0.0)};
    for (std::size_t q = 0; q < radial.nodes.size(); ++q) {
        double* row = &out.values[q * n_modes];
        for (std::size_t a = 0; a < angular.rule.nodes.size(); ++a) {
            const double eta = angular.rule.nodes[a];
            const Point y = w.from_local(radial.nodes[q], eta);
            const double v = profile_value(b, kind, y, eta + w.alpha());
            if (v == 0.0) continue;
            const double weighted = angular.rule.weights[a] * v;
            // Chebyshev recurrence T(n+1) = 2 cos(x) T(n) - T(n-1) for sin(n x) and cos(n x)
            const double x = mu * eta, two_cos = 2.0 * std::cos(x);
            double prev = cosine ? 1.0 : 0.0, cur = cosine ? std::cos(x) : std::sin(x);
            for (int n = 1; n <= n_modes; ++n) {
                row[n - 1] += weighted * cur;
                const double next = two_cos * cur - prev;
                prev = cur;
                cur = next;
            }
        }
    }
    return out;
}

// Last mode whose coefficient exceeds tol times the table maximum.
int significant_modes(const CoefficientTable& t, int n_modes, double tol) {
    double peak = 0.0;
    for (double v : t.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return 0;
    int last = 0;
    const std::size_t rows = t.values.size() / n_modes;
    for (std::size_t q = 0; q < rows; ++q)
        for (int n = n_modes; n > last; --n)
            if (std::abs(t.values[q * n_modes + n - 1]) > tol * peak) {
                last = n;
                break;
            }
    return last;
}

struct Source {
    enum Kind { u0, f0, g, f_radial, f_angular, f_div } kind;
    int mode = 0;  // noise mode for g
    CoefficientTable table;
};

}  // namespace

SolutionPath solve_representation(const ProblemSpec& spec, const WienerPath& path,
                                  const RepresentationOptions& options) {
    spec.validate();
    const auto* wp = std::get_if<WedgeDomain>(&spec.domain);
    require(wp != nullptr, "the representation engine needs a wedge domain");
    const WedgeDomain& w = *wp;
    require(spec.coefficients.isotropic(), "the representation engine needs a(t) = alpha(t) I");
    const int n_steps = spec.n_steps();
    require(path.n_steps == n_steps && std::abs(path.dt - spec.dt) <= 1e-12 * spec.dt,
            "Wiener path time grid does not match the problem");
    require(path.K >= spec.noise.K(), "Wiener path has fewer modes than the noise spec");
    require(options.max_modes >= 8, "max_modes must be at least 8");

    SolutionPath out;
    out.grid = make_grid(spec.domain, options.grid);
    out.wiener = path;
    out.coefficients = spec.coefficients;
    out.valid_radius = options.eval_radius > 0 ? options.eval_radius : 0.5 * w.r_max();
    const PolarGrid& grid = std::get<PolarGrid>(*out.grid);
    const WedgeKernel kernel(w);
    const double kappa = w.kappa(), mu = kPi / kappa;

    std::vector<int> steps;
    if (options.times.empty()) steps.push_back(n_steps);
    for (double t : options.times) {
        const int m = static_cast<int>(std::llround(t / spec.dt));
        require(m >= 1 && m <= n_steps && std::abs(m * spec.dt - t) <= 1e-9 * spec.T,
                "representation output times must be multiples of dt in (0, T]");
        steps.push_back(m);
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

    // radial support of all data and the finest kernel scale that is used
    std::vector<const Bump*> all_bumps;
    for (const ScalarField* field : {&spec.u0, &spec.f0, &spec.f.x, &spec.f.y})
        for (const auto& b : field->bumps) all_bumps.push_back(&b);
    for (const auto& g : spec.noise.fields)
        for (const auto& b : g.bumps) all_bumps.push_back(&b);

    std::vector<int> outputs;  // radial indices that are evaluated
    for (int i = 0; i + 1 < grid.n_r(); ++i)
        if (grid.r[i] <= out.valid_radius * (1 + 1e-12)) outputs.push_back(i);

    std::vector<std::vector<double>> results;
    if (all_bumps.empty()) {
        for (std::size_t k = 0; k < steps.size(); ++k) results.emplace_back(grid.size(), 0.0);
    } else {
        double r_lo = INFINITY, r_hi = 0.0, width_min = INFINITY, angle_min = INFINITY;
        for (const Bump* b : all_bumps) {
            const double c = norm(b->center);
            r_lo = std::min(r_lo, std::max(0.0, c - b->width));
            r_hi = std::max(r_hi, c + b->width);
            width_min = std::min(width_min, b->width);
            angle_min = std::min(angle_min, b->width / (c + b->width));
        }
        double tau_min = INFINITY;
        for (int m : steps)
            tau_min = std::min(tau_min, spec.coefficients.integrated_scalar((m - 1) * spec.dt, m * spec.dt));
        const double panel = std::min(0.5 * std::sqrt(tau_min), width_min / 3.0);
        const int radial_panels = std::max(1, static_cast<int>(std::ceil((r_hi - r_lo) / panel)));
        const QuadratureRule radial = composite_gauss_legendre(r_lo, r_hi, radial_panels, 10);
        const std::size_t Q = radial.nodes.size();

        // modes beyond kernel_modes are below 1e-16 of the first for every z in use
        double out_r_max = 0.0;
        for (int i : outputs) out_r_max = std::max(out_r_max, grid.r[i]);
        const double z_max = out_r_max * r_hi / (2.0 * tau_min);
        int kernel_modes = 1;
        {
            const double first = scaled_bessel_i(mu, z_max);
            while (scaled_bessel_i(kernel_modes * mu, z_max) > 1e-16 * first) {
                if (++kernel_modes > options.max_modes)
                    throw NumericalError("kernel series needs more than max_modes modes");
            }
        }

        // angular transforms, refined until the data coefficients have decayed
        // or the kernel cuts the series off
        std::vector<Source> sources;
        int n_modes = 0;
        for (double angular_panel = angle_min / 4.0;; angular_panel /= 2.0) {
            const AngularRule angular = make_angular_rule(kappa, angular_panel, mu, options.max_modes);
            const int cap = std::min(angular.trusted_modes, kernel_modes);
            sources.clear();
            auto add = [&](Source::Kind kind, int mode, const ScalarField& field, Profile profile, bool cosine) {
                for (const auto& b : field.bumps)
                    sources.push_back({kind, mode, transform(b, profile, cosine, w, radial, angular, cap)});
            };
            add(Source::u0, 0, spec.u0, Profile::value, false);
            add(Source::f0, 0, spec.f0, Profile::value, false);
            for (int k = 0; k < spec.noise.K(); ++k) add(Source::g, k, spec.noise.fields[k], Profile::value, false);
            if (options.gradient_form) {
                add(Source::f_radial, 0, spec.f.x, Profile::radial_x, false);
                add(Source::f_radial, 0, spec.f.y, Profile::radial_y, false);
                add(Source::f_angular, 0, spec.f.x, Profile::angular_x, true);
                add(Source::f_angular, 0, spec.f.y, Profile::angular_y, true);
            } else {
                add(Source::f_div, 0, spec.f.x, Profile::dx, false);
                add(Source::f_div, 0, spec.f.y, Profile::dy, false);
            }
            n_modes = 0;
            for (const auto& s : sources) n_modes = std::max(n_modes, significant_modes(s.table, cap, options.coefficient_tol));
            if (n_modes < cap || cap == kernel_modes) {
                // re-pack tables to the significant mode count
                for (auto& s : sources) {
                    std::vector<double> packed(Q * n_modes);
                    for (std::size_t q = 0; q < Q; ++q)
                        std::copy_n(&s.table.values[q * cap], n_modes, &packed[q * n_modes]);
                    s.table.values = std::move(packed);
                }
                break;
            }
            if (angular.trusted_modes >= options.max_modes)
                throw NumericalError("data angular coefficients did not decay within max_modes");
        }
        const bool has_f = !spec.f.is_zero();

        // per output radius and mode, the radial integral of kernel times data
        std::vector<double> acc;
        std::vector<double> h_sin(Q * n_modes), f_rad(Q * n_modes), f_ang(Q * n_modes);
        std::vector<double> b(n_modes + 1), b_up(n_modes + 1);
        auto accumulate_term = [&](double tau, const std::function<double(const Source&)>& weight) {
            std::fill(h_sin.begin(), h_sin.end(), 0.0);
            std::fill(f_rad.begin(), f_rad.end(), 0.0);
            std::fill(f_ang.begin(), f_ang.end(), 0.0);
            bool any_f = false, any = false;
            for (const auto& s : sources) {
                const double c = weight(s);
                if (c == 0.0) continue;
                std::vector<double>& target =
                    s.kind == Source::f_radial ? f_rad : (s.kind == Source::f_angular ? f_ang : h_sin);
                any_f = any_f || s.kind == Source::f_radial || s.kind == Source::f_angular;
                any = true;
                for (std::size_t k = 0; k < target.size(); ++k) target[k] += c * s.table.values[k];
            }
            if (!any) return;
            const double scale = 1.0 / (kappa * tau);
            for (std::size_t o = 0; o < outputs.size(); ++o) {
                const double r = grid.r[outputs[o]];
                double* row = &acc[o * n_modes];
                for (std::size_t q = 0; q < Q; ++q) {
                    const double rq = radial.nodes[q], gap = r - rq;
                    const double radial_exp = gap * gap / (4.0 * tau);
                    if (radial_exp > kRadialCutoff) continue;
                    const double z = r * rq / (2.0 * tau);
                    const double gauss = std::exp(-radial_exp) * scale * radial.weights[q];
                    const double first = scaled_bessel_i(mu, z);
                    for (int n = 1; n <= n_modes; ++n) {
                        const double nu = n * mu;
                        const double bn = n == 1 ? first : scaled_bessel_i(nu, z);
                        const std::size_t k = q * n_modes + (n - 1);
                        double term = rq * bn * h_sin[k];
                        if (any_f) {
                            // -(dG/dr' f_r + (1/r') dG/deta' f_eta) r'
                            const double up = scaled_bessel_i(nu + 1.0, z);
                            const double d_r = (nu / rq - rq / (2.0 * tau)) * bn + (r / (2.0 * tau)) * up;
                            term -= rq * d_r * f_rad[k] + nu * bn * f_ang[k];
                        }
                        row[n - 1] += gauss * term;
                        if (bn <= 1e-16 * first && nu * nu > z) break;
                    }
                }
            }
        };

        for (int m : steps) {
            const double t = m * spec.dt;
            acc.assign(outputs.size() * n_modes, 0.0);
            std::vector<double> values(grid.size(), 0.0);
            int dropped = 0;
            auto kernel_time = [&](double s) { return spec.coefficients.integrated_scalar(s, t); };

            // initial data
            if (!spec.u0.is_zero()) {
                const double tau = kernel_time(0.0);
                if (tau >= kernel.min_time())
                    accumulate_term(tau, [](const Source& s) { return s.kind == Source::u0 ? s.table.bump.time_factor(0.0) : 0.0; });
                else
                    ++dropped;
            }
            for (int j = 0; j < m; ++j) {
                const double s_j = j * spec.dt;
                const double tau = kernel_time(s_j);
                if (tau < kernel.min_time()) {
                    ++dropped;
                    continue;
                }
                const double trap = (j == 0 ? 0.5 : 1.0) * spec.dt;
                accumulate_term(tau, [&](const Source& s) {
                    switch (s.kind) {
                        case Source::u0: return 0.0;
                        case Source::g: return s.table.bump.time_factor(s_j) * path.dw(j, s.mode);
                        default: return trap * s.table.bump.time_factor(s_j);
                    }
                });
            }
            for (std::size_t o = 0; o < outputs.size(); ++o) {
                const int i = outputs[o];
                for (int jj = 1; jj < grid.n_eta(); ++jj) {
                    double v = 0.0;
                    for (int n = 1; n <= n_modes; ++n) v += std::sin(n * mu * grid.eta[jj]) * acc[o * n_modes + n - 1];
                    values[grid.index(i, jj)] = v;
                }
            }
            // tau = 0 end of the trapezoid rule: G acts as the identity
            if (!spec.f0.is_zero() || has_f) {
                for (int i : outputs)
                    for (int jj = 1; jj < grid.n_eta(); ++jj) {
                        const Point x = grid.node(i, jj);
                        values[grid.index(i, jj)] += 0.5 * spec.dt * (spec.f0(t, x) + spec.f.divergence(t, x));
                    }
            }
            if (dropped > 0)
                out.warnings.push_back("dropped " + std::to_string(dropped) +
                                       " terms with kernel time below min_time; error O(sqrt(min_time))");
            results.push_back(std::move(values));
        }
    }

    // snapshot 0 is the sampled initial data
    std::vector<double> start(grid.size(), 0.0);
    for (int i = 0; i + 1 < grid.n_r(); ++i)
        for (int j = 1; j < grid.n_eta(); ++j) start[grid.index(i, j)] = spec.u0(0.0, grid.node(i, j));
    out.times.push_back(0.0);
    out.snapshots.push_back(std::move(start));
    for (std::size_t k = 0; k < steps.size(); ++k) {
        out.times.push_back(steps[k] * spec.dt);
        out.snapshots.push_back(std::move(results[k]));
    }
    return out;
}

}  // namespace conic
