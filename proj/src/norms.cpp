#include "conic_spde/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "conic_spde/errors.hpp"

namespace conic {

void WeightParams::validate() const {
    require(p >= 2, "p must be >= 2");
    require(m >= 0 && m <= 2, "derivative order m must be 0, 1 or 2");
    require(std::isfinite(theta) && std::isfinite(Theta), "weights must be finite");
}

std::string to_string(Admissibility a) {
    switch (a) {
        case Admissibility::inside: return "inside";
        case Admissibility::outside: return "outside";
        case Admissibility::borderline: return "borderline";
    }
    return "outside";
}

Admissibility classify(const WeightParams& w, const AdmissibleRanges& ranges) {
    const double tol = 1e-9;
    auto near = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
    if (near(w.theta, ranges.theta.lo) || near(w.theta, ranges.theta.hi) || near(w.Theta, ranges.Theta.lo) ||
        near(w.Theta, ranges.Theta.hi))
        return Admissibility::borderline;
    return ranges.theta.contains(w.theta) && ranges.Theta.contains(w.Theta) ? Admissibility::inside
                                                                           : Admissibility::outside;
}

std::vector<Cell> quadrature_cells(const Grid& grid) {
    std::vector<Cell> cells;
    if (const auto* pg = std::get_if<PolarGrid>(&grid)) {
        const double de = pg->eta[1] - pg->eta[0];
        for (int i = 0; i < pg->n_r(); ++i)
            for (int j = 0; j < pg->n_eta(); ++j) {
                const double rb = pg->r_below(i), rt = pg->r[i];
                const double rc = 0.5 * (rb + rt), ec = 0.5 * (pg->eta[j] + pg->eta[j + 1]);
                Cell c;
                c.center = pg->domain.from_local(rc, ec);
                c.area = 0.5 * (rt * rt - rb * rb) * de;
                c.rho = pg->domain.rho_local(rc, ec);
                c.rho_vertex = rc;
                const int below_j = i == 0 ? -1 : static_cast<int>(pg->index(i - 1, j));
                const int below_j1 = i == 0 ? -1 : static_cast<int>(pg->index(i - 1, j + 1));
                c.corners[0] = below_j;
                c.corners[1] = static_cast<int>(pg->index(i, j));
                c.corners[2] = static_cast<int>(pg->index(i, j + 1));
                c.corners[3] = below_j1;
                c.touches_boundary = j == 0 || j + 1 == pg->n_eta() || i + 1 == pg->n_r();
                c.touches_vertex = i == 0;
                cells.push_back(c);
            }
    } else {
        const auto& g = std::get<CartesianGrid>(grid);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const Point center{g.origin.x + (i + 0.5) * g.h, g.origin.y + (j + 0.5) * g.h};
                if (!g.domain.contains(center)) continue;
                Cell c;
                c.center = center;
                c.area = g.h * g.h;
                c.rho = g.domain.boundary_distance(center);
                c.rho_vertex = g.domain.rho_vertex(center);
                c.corners[0] = static_cast<int>(g.index(i, j));
                c.corners[1] = static_cast<int>(g.index(i + 1, j));
                c.corners[2] = static_cast<int>(g.index(i + 1, j + 1));
                c.corners[3] = static_cast<int>(g.index(i, j + 1));
                c.touches_boundary = !(g.is_interior(i, j) && g.is_interior(i + 1, j) && g.is_interior(i + 1, j + 1) &&
                                       g.is_interior(i, j + 1));
                c.touches_vertex = c.rho_vertex < 1.5 * g.h;
                cells.push_back(c);
            }
    }
    return cells;
}

CellValues cell_values(const Grid& grid, const std::vector<Cell>& cells, const std::vector<double>& nodal) {
    CellValues out;
    out.value.resize(cells.size());
    out.grad_x.resize(cells.size());
    out.grad_y.resize(cells.size());
    const auto* pg = std::get_if<PolarGrid>(&grid);
    const auto* cg = std::get_if<CartesianGrid>(&grid);
    std::size_t polar_index = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        double v[4];
        for (int k = 0; k < 4; ++k) v[k] = cells[c].corners[k] < 0 ? 0.0 : nodal[cells[c].corners[k]];
        out.value[c] = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        if (pg) {
            // corners: (i-1, j), (i, j), (i, j+1), (i-1, j+1)
            const int i = static_cast<int>(polar_index / pg->n_eta()), j = static_cast<int>(polar_index % pg->n_eta());
            ++polar_index;
            const double dr = pg->r[i] - pg->r_below(i), de = pg->eta[j + 1] - pg->eta[j];
            const double rc = 0.5 * (pg->r[i] + pg->r_below(i));
            const double u_r = ((v[1] + v[2]) - (v[0] + v[3])) / (2.0 * dr);
            const double u_e = ((v[2] + v[3]) - (v[0] + v[1])) / (2.0 * de);
            const double phi = 0.5 * (pg->eta[j] + pg->eta[j + 1]) + pg->domain.alpha();
            const double cs = std::cos(phi), sn = std::sin(phi);
            out.grad_x[c] = cs * u_r - sn * u_e / rc;
            out.grad_y[c] = sn * u_r + cs * u_e / rc;
        } else {
            // corners: (i, j), (i+1, j), (i+1, j+1), (i, j+1)
            out.grad_x[c] = ((v[1] + v[2]) - (v[0] + v[3])) / (2.0 * cg->h);
            out.grad_y[c] = ((v[2] + v[3]) - (v[0] + v[1])) / (2.0 * cg->h);
        }
    }
    return out;
}

void nodal_gradient(const Grid& grid, const std::vector<double>& u, std::vector<double>& ux, std::vector<double>& uy) {
    ux.assign(u.size(), 0.0);
    uy.assign(u.size(), 0.0);
    if (const auto* pg = std::get_if<PolarGrid>(&grid)) {
        const int nr = pg->n_r(), ne = pg->n_eta();
        const double de = pg->eta[1] - pg->eta[0];
        auto at = [&](int i, int j) { return i < 0 ? 0.0 : u[pg->index(i, j)]; };
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j <= ne; ++j) {
                double u_r;
                if (i + 1 < nr) {
                    const double hm = pg->r[i] - pg->r_below(i), hp = pg->r[i + 1] - pg->r[i];
                    u_r = -hp / (hm * (hm + hp)) * at(i - 1, j) + (hp - hm) / (hm * hp) * at(i, j) +
                          hm / (hp * (hm + hp)) * at(i + 1, j);
                } else {
                    // one-sided through r_{i-2}, r_{i-1}, r_i
                    const double h1 = pg->r[i] - pg->r[i - 1], h2 = pg->r[i - 1] - pg->r_below(i - 1);
                    const double s = h1 + h2;
                    u_r = (h1 + s) / (h1 * s) * at(i, j) - s / (h1 * h2) * at(i - 1, j) + h1 / (h2 * s) * at(i - 2, j);
                }
                double u_e;
                if (j == 0)
                    u_e = (-3.0 * at(i, 0) + 4.0 * at(i, 1) - at(i, 2)) / (2.0 * de);
                else if (j == ne)
                    u_e = (3.0 * at(i, ne) - 4.0 * at(i, ne - 1) + at(i, ne - 2)) / (2.0 * de);
                else
                    u_e = (at(i, j + 1) - at(i, j - 1)) / (2.0 * de);
                const double phi = pg->eta[j] + pg->domain.alpha();
                const double cs = std::cos(phi), sn = std::sin(phi), r = pg->r[i];
                ux[pg->index(i, j)] = cs * u_r - sn * u_e / r;
                uy[pg->index(i, j)] = sn * u_r + cs * u_e / r;
            }
    } else {
        const auto& g = std::get<CartesianGrid>(grid);
        auto at = [&](int i, int j) { return u[g.index(i, j)]; };
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                double dx, dy;
                if (i == 0)
                    dx = -3.0 * at(0, j) + 4.0 * at(1, j) - at(2, j);
                else if (i == g.nx)
                    dx = 3.0 * at(i, j) - 4.0 * at(i - 1, j) + at(i - 2, j);
                else
                    dx = at(i + 1, j) - at(i - 1, j);
                if (j == 0)
                    dy = -3.0 * at(i, 0) + 4.0 * at(i, 1) - at(i, 2);
                else if (j == g.ny)
                    dy = 3.0 * at(i, j) - 4.0 * at(i, j - 1) + at(i, j - 2);
                else
                    dy = at(i, j + 1) - at(i, j - 1);
                ux[g.index(i, j)] = dx / (2.0 * g.h);
                uy[g.index(i, j)] = dy / (2.0 * g.h);
            }
    }
}

namespace {

bool in_radius(const Cell& c, const NormOptions& options) {
    return !options.max_radius || norm(c.center) <= *options.max_radius;
}

// Cell-centre derivative data for all multi-indices up to order m:
// [0] = f, [1] = f_x, [2] = f_y, [3] = f_xx, [4] = f_xy, [5] = f_yy.
using Derivatives = std::vector<std::array<double, 6>>;

NormResult assemble(const std::vector<Cell>& cells, const Derivatives& d, const WeightParams& w,
                    const NormOptions& options) {
    w.validate();
    static constexpr int first_index[3] = {0, 1, 3};
    static constexpr int count[3] = {1, 2, 3};
    NormResult out;
    out.seminorms.assign(w.m + 1, 0.0);
    bool boundary_mass = false, vertex_mass = false;
    for (int order = 0; order <= w.m; ++order)
        for (int a = 0; a < count[order]; ++a) {
            const int idx = first_index[order] + a;
            double integral = 0.0;
            for (std::size_t c = 0; c < cells.size(); ++c) {
                const Cell& cell = cells[c];
                if (!in_radius(cell, options)) continue;
                const double v = std::abs(std::pow(cell.rho, order) * d[c][idx]);
                if (v == 0.0) continue;
                boundary_mass = boundary_mass || cell.touches_boundary;
                vertex_mass = vertex_mass || cell.touches_vertex;
                const double weight = std::pow(cell.rho_vertex, w.theta - w.Theta) * std::pow(cell.rho, w.Theta - 2.0);
                integral += std::pow(v, w.p) * weight * cell.area;
            }
            out.seminorms[order] += std::pow(integral, 1.0 / w.p);
        }
    for (double s : out.seminorms) out.value += s;
    if (w.Theta - 2.0 <= -1.0 && boundary_mass) {
        out.divergence_warning = true;
        out.warning = "Theta - d <= -1: boundary weight is not integrable";
    }
    if (w.theta <= 0.0 && vertex_mass) {
        out.divergence_warning = true;
        out.warning += std::string(out.warning.empty() ? "" : "; ") + "theta <= 0: vertex weight is not integrable";
    }
    return out;
}

}  // namespace

NormResult k_norm(const GridFunction& u, const WeightParams& w, const NormOptions& options) {
    w.validate();
    const Grid& grid = *u.grid;
    require(u.values.size() == grid_size(grid), "grid function size does not match its grid");
    const std::vector<Cell> cells = quadrature_cells(grid);
    const CellValues base = cell_values(grid, cells, u.values);
    Derivatives d(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) d[c] = {base.value[c], base.grad_x[c], base.grad_y[c], 0, 0, 0};
    if (w.m >= 2) {
        std::vector<double> ux, uy;
        nodal_gradient(grid, u.values, ux, uy);
        const CellValues dx = cell_values(grid, cells, ux), dy = cell_values(grid, cells, uy);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            d[c][3] = dx.grad_x[c];
            d[c][4] = 0.5 * (dx.grad_y[c] + dy.grad_x[c]);
            d[c][5] = dy.grad_y[c];
        }
    }
    return assemble(cells, d, w, options);
}

NormResult k_norm(const std::function<double(Point)>& f, const Grid& grid, const WeightParams& w,
                  const NormOptions& options) {
    w.validate();
    const std::vector<Cell> cells = quadrature_cells(grid);
    Derivatives d(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const Point x = cells[c].center;
        d[c] = {f(x), 0, 0, 0, 0, 0};
        if (w.m == 0) continue;
        const double size = std::sqrt(cells[c].area);
        const double h1 = 1e-4 * size;
        d[c][1] = (f({x.x + h1, x.y}) - f({x.x - h1, x.y})) / (2 * h1);
        d[c][2] = (f({x.x, x.y + h1}) - f({x.x, x.y - h1})) / (2 * h1);
        if (w.m < 2) continue;
        const double h = 1e-2 * size;
        const double fc = d[c][0];
        d[c][3] = (f({x.x + h, x.y}) - 2 * fc + f({x.x - h, x.y})) / (h * h);
        d[c][5] = (f({x.x, x.y + h}) - 2 * fc + f({x.x, x.y - h})) / (h * h);
        d[c][4] = (f({x.x + h, x.y + h}) - f({x.x + h, x.y - h}) - f({x.x - h, x.y + h}) + f({x.x - h, x.y - h})) /
                  (4 * h * h);
    }
    return assemble(cells, d, w, options);
}

double weighted_sup(const GridFunction& u, int k, const WeightParams& w, const NormOptions& options) {
    w.validate();
    require(k >= 0 && k <= 2, "derivative order must be 0, 1 or 2");
    const Grid& grid = *u.grid;
    const std::vector<Point> nodes = grid_nodes(grid);
    const std::vector<unsigned char> boundary = grid_boundary_mask(grid);
    std::vector<double> magnitude(nodes.size());
    if (k == 0) {
        for (std::size_t n = 0; n < nodes.size(); ++n) magnitude[n] = std::abs(u.values[n]);
    } else {
        std::vector<double> ux, uy;
        nodal_gradient(grid, u.values, ux, uy);
        if (k == 1) {
            for (std::size_t n = 0; n < nodes.size(); ++n) magnitude[n] = std::hypot(ux[n], uy[n]);
        } else {
            std::vector<double> uxx, uxy, uyx, uyy;
            nodal_gradient(grid, ux, uxx, uxy);
            nodal_gradient(grid, uy, uyx, uyy);
            for (std::size_t n = 0; n < nodes.size(); ++n) {
                const double mixed = 0.5 * (uxy[n] + uyx[n]);
                magnitude[n] = std::sqrt(uxx[n] * uxx[n] + 2 * mixed * mixed + uyy[n] * uyy[n]);
            }
        }
    }
    const auto* pg = std::get_if<PolarGrid>(&grid);
    double best = 0.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        if (boundary[n]) continue;
        const Point x = nodes[n];
        if (options.max_radius && norm(x) > *options.max_radius) continue;
        double rb, rv;
        if (pg) {
            const LocalPolar lp = pg->domain.to_local(x);
            rb = pg->domain.rho_local(lp.r, lp.eta);
            rv = lp.r;
        } else {
            const auto& cg = std::get<CartesianGrid>(grid);
            rb = cg.domain.boundary_distance(x);
            rv = cg.domain.rho_vertex(x);
        }
        const double weight = std::pow(rb, k - 1.0 + w.Theta / w.p) * std::pow(rv, (w.theta - w.Theta) / w.p);
        best = std::max(best, weight * magnitude[n]);
    }
    return best;
}

DilationReport dilation_check(const std::function<double(Point)>& u, const Grid& grid, const WeightParams& w,
                              double lambda, double support_radius) {
    require(lambda > 0, "dilation factor must be positive");
    require(support_radius > 0, "support radius must be positive");
    if (const auto* pg = std::get_if<PolarGrid>(&grid)) {
        const double limit = 0.5 * pg->domain.r_max();
        if (support_radius > limit || support_radius / lambda > limit)
            throw ValidationError("u and u(lambda x) must be supported in r <= r_max / 2");
    }
    WeightParams order0 = w;
    order0.m = 0;
    DilationReport out;
    out.norm = k_norm(u, grid, order0).value;
    out.norm_dilated = k_norm([&](Point x) { return u(lambda * x); }, grid, order0).value;
    out.ratio = out.norm > 0 ? out.norm_dilated / out.norm : 0.0;
    out.expected = std::pow(lambda, -w.theta / w.p);
    out.relative_error = out.norm > 0 ? std::abs(out.ratio / out.expected - 1.0) : 0.0;
    return out;
}

}  // namespace conic
