#include "conic_spde/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conic_spde/bessel.hpp"
#include "conic_spde/errors.hpp"
#include "conic_spde/rng.hpp"

namespace conic {

namespace {

constexpr double kSeriesTol = 1e-14;
// exp(-x) underflows to zero for x beyond this
constexpr double kUnderflowExponent = 745.0;

}  // namespace

BoundFactors bound_factors(const WedgeDomain& domain, double t, Point x) {
    const double st = std::sqrt(t);
    const double rv = domain.rho_vertex(x), rb = domain.rho(x);
    return {rv / (rv + st), rb / (rb + st)};
}

WedgeKernel::WedgeKernel(const WedgeDomain& domain, int n_modes, double min_time)
    : domain_(domain), n_modes_(n_modes), min_time_(min_time > 0 ? min_time : domain.r_max() * domain.r_max() * 1e-6) {
    require(n_modes >= 8, "kernel needs at least 8 modes");
}

void WedgeKernel::check_time(double dt) const {
    if (!(dt >= min_time_))
        throw ValidationError("kernel time step " + std::to_string(dt) + " is below min_time " +
                              std::to_string(min_time_));
}

double WedgeKernel::eval_local(double dt, LocalPolar x, LocalPolar y) const {
    check_time(dt);
    if (x.r <= 0 || y.r <= 0) return 0.0;
    const double kappa = domain_.kappa();
    const double mu = kPi / kappa;
    const double gap = x.r - y.r;
    const double radial = gap * gap / (4.0 * dt);
    if (radial > kUnderflowExponent) return 0.0;
    const double z = x.r * y.r / (2.0 * dt);

    double sum = 0.0, magnitude = 0.0;
    bool converged = false;
    for (int n = 1; n <= n_modes_; ++n) {
        const double nu = n * mu;
        const double b = scaled_bessel_i(nu, z);
        magnitude += b;
        sum += b * (std::sin(nu * x.eta) * std::sin(nu * y.eta));
        if (b <= kSeriesTol * magnitude) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericalError("wedge kernel series did not converge within n_modes");
    return std::exp(-radial) * sum / (kappa * dt);
}

double WedgeKernel::eval(double dt, Point x, Point y) const {
    return eval_local(dt, domain_.to_local(x), domain_.to_local(y));
}

std::pair<double, double> WedgeKernel::grad_y_local(double dt, LocalPolar x, LocalPolar y) const {
    check_time(dt);
    if (x.r <= 0 || y.r <= 0) return {0.0, 0.0};
    const double kappa = domain_.kappa();
    const double mu = kPi / kappa;
    const double gap = x.r - y.r;
    const double radial = gap * gap / (4.0 * dt);
    if (radial > kUnderflowExponent) return {0.0, 0.0};
    const double z = x.r * y.r / (2.0 * dt);

    // d/dr' [e^{-(r-r')^2/4t} b_nu(z)] = e^{..} [(nu/r' - r'/2t) b_nu + (r/2t) b_{nu+1}]
    double d_r = 0.0, d_eta = 0.0, magnitude = 0.0;
    bool converged = false;
    double b = scaled_bessel_i(mu, z);
    for (int n = 1; n <= n_modes_; ++n) {
        const double nu = n * mu;
        const double b_up = scaled_bessel_i(nu + 1.0, z);
        const double sx = std::sin(nu * x.eta);
        const double radial_term = (nu / y.r - y.r / (2.0 * dt)) * b + (x.r / (2.0 * dt)) * b_up;
        d_r += radial_term * sx * std::sin(nu * y.eta);
        d_eta += b * sx * nu * std::cos(nu * y.eta);
        const double term_size = std::max(std::abs(radial_term), nu * b);
        magnitude += term_size;
        if (term_size <= kSeriesTol * magnitude) {
            converged = true;
            break;
        }
        b = scaled_bessel_i((n + 1) * mu, z);
    }
    if (!converged) throw NumericalError("wedge kernel gradient series did not converge within n_modes");
    const double scale = std::exp(-radial) / (kappa * dt);
    return {scale * d_r, scale * d_eta};
}

Point WedgeKernel::grad_y(double dt, Point x, Point y) const {
    const LocalPolar ly = domain_.to_local(y);
    const auto [d_r, d_eta] = grad_y_local(dt, domain_.to_local(x), ly);
    const double phi = ly.eta + domain_.alpha();
    const double c = std::cos(phi), s = std::sin(phi);
    const double tangential = ly.r > 0 ? d_eta / ly.r : 0.0;
    return {d_r * c - tangential * s, d_r * s + tangential * c};
}

double free_heat_kernel(double dt, Point x, Point y) {
    const Point d = x - y;
    return std::exp(-dot(d, d) / (4.0 * dt)) / (4.0 * kPi * dt);
}

double half_plane_kernel(const WedgeDomain& half_plane, double dt, Point x, Point y) {
    require(half_plane.kappa() == kPi, "half_plane_kernel needs kappa = pi");
    // local frame: edge along the first axis, interior above it
    const LocalPolar lx = half_plane.to_local(x), ly = half_plane.to_local(y);
    const Point px{lx.r * std::cos(lx.eta), lx.r * std::sin(lx.eta)};
    const Point py{ly.r * std::cos(ly.eta), ly.r * std::sin(ly.eta)};
    const double dx = px.x - py.x;
    const double direct = dx * dx + (px.y - py.y) * (px.y - py.y);
    // difference of the two Gaussians written without cancellation
    const double lead = std::exp(-direct / (4.0 * dt));
    return lead * -std::expm1(-px.y * py.y / dt) / (4.0 * kPi * dt);
}

namespace {

ResidualReport residual_levels(const std::function<double(double, Point)>& F, const std::vector<double>& t_grid,
                               const std::vector<Point>& x_grid, double h) {
    ResidualReport report;
    for (int level = 0; level < 3; ++level) {
        const double step = h / (1 << level);
        double worst = 0.0;
        for (double t : t_grid) {
            const double ht = step * t, hx = step * std::sqrt(t);
            for (Point x : x_grid) {
                const double center = F(t, x);
                const double dt_f = (F(t + ht, x) - F(t - ht, x)) / (2.0 * ht);
                const double lap = (F(t, {x.x + hx, x.y}) + F(t, {x.x - hx, x.y}) + F(t, {x.x, x.y + hx}) +
                                    F(t, {x.x, x.y - hx}) - 4.0 * center) /
                                   (hx * hx);
                worst = std::max(worst, std::abs(dt_f - lap));
            }
        }
        report.steps.push_back(step);
        report.max_residual.push_back(worst);
    }
    for (std::size_t k = 1; k < report.max_residual.size(); ++k) {
        const double prev = report.max_residual[k - 1], cur = report.max_residual[k];
        report.orders.push_back(prev > 0 && cur > 0 ? std::log2(prev / cur) : 0.0);
    }
    report.order = report.orders.back();
    return report;
}

}  // namespace

ResidualReport check_function_residual(const std::function<double(double, Point)>& F,
                                       const std::vector<double>& t_grid, const std::vector<Point>& x_grid,
                                       double h) {
    require(h > 0 && h < 1, "relative step must lie in (0, 1)");
    require(!t_grid.empty() && !x_grid.empty(), "residual check needs sample times and points");
    for (double t : t_grid) require(t > 0, "sample times must be positive");
    return residual_levels(F, t_grid, x_grid, h);
}

ResidualReport check_pde_residual(const WedgeKernel& kernel, const std::vector<double>& dt_grid,
                                  const std::vector<Point>& x_grid, Point y, double h) {
    require(h > 0 && h < 1, "relative step must lie in (0, 1)");
    const WedgeDomain& domain = kernel.domain();
    const double t_max = *std::max_element(dt_grid.begin(), dt_grid.end());
    const double t_min = *std::min_element(dt_grid.begin(), dt_grid.end());
    require(t_min * (1 - h) >= kernel.min_time(), "residual stencil reaches below the kernel min_time");
    // the five-point stencil must stay inside the wedge and away from y
    std::vector<Point> usable;
    for (Point x : x_grid) {
        if (!domain.contains(x)) continue;
        const double reach = 1.5 * h * std::sqrt(t_max);
        if (domain.rho(x) > reach && norm(x - y) > reach) usable.push_back(x);
    }
    require(!usable.empty(), "no sample point is far enough from the boundary and from y");
    auto F = [&](double t, Point x) { return kernel.eval(t, x, y); };
    return residual_levels(F, dt_grid, usable, h);
}

GreenBoundFit check_green_bound(const WedgeKernel& kernel, double lambda_plus, double lambda_minus,
                                const GreenSamplePlan& plan) {
    const WedgeDomain& domain = kernel.domain();
    const double critical = kPi / domain.kappa();
    require(lambda_plus > 0 && lambda_minus > 0, "exponents must be positive");
    if (lambda_plus >= critical || lambda_minus >= critical)
        throw ValidationError("Green bound exponents must lie strictly below pi/kappa");
    require(plan.samples >= 1, "need at least one sample");
    require(plan.t_min > 0 && plan.t_min <= plan.t_max, "bad sample time range");
    require(plan.t_min >= kernel.min_time(), "sample times must respect the kernel min_time");
    require(plan.radius_lo > 0 && plan.radius_lo < plan.radius_hi, "bad sample radius range");
    require(!plan.sigmas.empty(), "need candidate sigma values");
    for (double s : plan.sigmas) require(s > 0 && s <= 0.25, "sigma candidates must lie in (0, 1/4]");

    RandomStream stream(plan.seed, 0x6b65726e, 0);
    const int total = 2 * plan.samples;
    std::vector<GreenSample> samples(total);
    std::vector<double> log_base(total), log_grad_base(total), dist2_t(total);
    const double log_tlo = std::log(plan.t_min), log_thi = std::log(plan.t_max);
    const double log_rlo = std::log(plan.radius_lo), log_rhi = std::log(plan.radius_hi);
    for (int k = 0; k < total; ++k) {
        GreenSample& s = samples[k];
        s.t = std::exp(stream.uniform(log_tlo, log_thi));
        const double st = std::sqrt(s.t);
        const double rx = st * std::exp(stream.uniform(log_rlo, log_rhi));
        const double ex = stream.uniform(0.0, domain.kappa());
        const double ry = st * std::exp(stream.uniform(log_rlo, log_rhi));
        const double ey = stream.uniform(0.0, domain.kappa());
        s.x = domain.from_local(rx, ex);
        s.y = domain.from_local(ry, ey);
        s.G = kernel.eval_local(s.t, {rx, ex}, {ry, ey});
        s.grad_norm = norm(kernel.grad_y(s.t, s.x, s.y));
        const BoundFactors fx{rx / (rx + st), domain.rho_local(rx, ex) / (domain.rho_local(rx, ex) + st)};
        const BoundFactors fy{ry / (ry + st), domain.rho_local(ry, ey) / (domain.rho_local(ry, ey) + st)};
        const double shared = (lambda_plus - 1.0) * std::log(fx.R) + (lambda_minus - 1.0) * std::log(fy.R) +
                              std::log(fx.J);
        log_base[k] = -std::log(s.t) + shared + std::log(fy.J);
        log_grad_base[k] = -1.5 * std::log(s.t) + shared;
        const Point d = s.x - s.y;
        dist2_t[k] = dot(d, d) / s.t;
    }

    auto ratio = [](double value, double log_majorant) {
        return value > 0 ? std::exp(std::log(value) - log_majorant) : 0.0;
    };
    GreenBoundFit fit;
    std::vector<double> sigmas = plan.sigmas;
    std::sort(sigmas.rbegin(), sigmas.rend());
    const GreenSigmaRow* chosen = nullptr;
    for (double sigma : sigmas) {
        GreenSigmaRow row;
        row.sigma = sigma;
        for (int k = 0; k < total; ++k) {
            const double rg = ratio(samples[k].G, log_base[k] - sigma * dist2_t[k]);
            const double rd = ratio(samples[k].grad_norm, log_grad_base[k] - sigma * dist2_t[k]);
            if (k < plan.samples) {
                row.N = std::max(row.N, rg);
                row.N_grad = std::max(row.N_grad, rd);
            }
            row.N_doubled = std::max(row.N_doubled, rg);
            row.N_grad_doubled = std::max(row.N_grad_doubled, rd);
        }
        const bool finite = std::isfinite(row.N_doubled) && std::isfinite(row.N_grad_doubled) && row.N > 0;
        row.stable = finite && row.N_doubled < 1.2 * row.N && row.N_grad_doubled < 1.2 * row.N_grad;
        fit.rows.push_back(row);
    }
    for (const auto& row : fit.rows)
        if (row.stable) {
            chosen = &row;
            break;
        }
    const GreenSigmaRow& report = chosen ? *chosen : fit.rows.back();
    fit.sigma = report.sigma;
    fit.N = report.N;
    fit.N_doubled = report.N_doubled;
    fit.relative_change = report.N > 0 ? report.N_doubled / report.N - 1.0 : std::numeric_limits<double>::infinity();
    fit.N_grad = report.N_grad;
    fit.grad_relative_change =
        report.N_grad > 0 ? report.N_grad_doubled / report.N_grad - 1.0 : std::numeric_limits<double>::infinity();
    fit.pass = chosen != nullptr;
    for (int k = 0; k < total; ++k) {
        samples[k].majorant = std::exp(log_base[k] - fit.sigma * dist2_t[k]);
        samples[k].grad_majorant = std::exp(log_grad_base[k] - fit.sigma * dist2_t[k]);
    }
    fit.samples = std::move(samples);
    return fit;
}

}  // namespace conic
