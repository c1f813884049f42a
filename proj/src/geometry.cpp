#include "conic_spde/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "conic_spde/errors.hpp"

namespace conic {

namespace {

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0) w += kTwoPi;
    return w;
}

double segment_distance(Point x, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(x - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(x - (a + t * ab));
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
    auto orient = [](Point a, Point b, Point c) { return cross(b - a, c - a); };
    auto on_segment = [](Point a, Point b, Point c) {
        return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
               std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
    };
    const double d1 = orient(q1, q2, p1), d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1), d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

}  // namespace

WedgeDomain::WedgeDomain(double kappa, double alpha, double r_max)
    : kappa_(kappa), alpha_(alpha), r_max_(r_max) {
    require(kappa > 0 && kappa < kTwoPi, "wedge angle kappa must lie in (0, 2pi)");
    require(alpha >= 0 && alpha < kTwoPi, "wedge rotation alpha must lie in [0, 2pi)");
    require(r_max > 0, "truncation radius r_max must be positive");
}

LocalPolar WedgeDomain::to_local(Point x) const {
    return {norm(x), wrap_angle(std::atan2(x.y, x.x) - alpha_)};
}

Point WedgeDomain::from_local(double r, double eta) const {
    const double phi = eta + alpha_;
    return {r * std::cos(phi), r * std::sin(phi)};
}

bool WedgeDomain::contains(Point x) const {
    const LocalPolar lp = to_local(x);
    return lp.r > 0 && lp.eta > 0 && lp.eta < kappa_;
}

double WedgeDomain::rho_local(double r, double eta) const {
    const double gap = std::min(eta, kappa_ - eta);
    return gap <= kPi / 2 ? r * std::sin(gap) : r;
}

double WedgeDomain::rho(Point x) const {
    if (!contains(x)) throw DomainMembershipError("point is not strictly inside the wedge");
    const LocalPolar lp = to_local(x);
    return rho_local(lp.r, lp.eta);
}

double WedgeDomain::rho_vertex(Point x) const {
    if (!contains(x)) throw DomainMembershipError("point is not strictly inside the wedge");
    return norm(x);
}

std::vector<double> polygon_interior_angles(const std::vector<Point>& v) {
    const std::size_t m = v.size();
    std::vector<double> angles(m);
    for (std::size_t k = 0; k < m; ++k) {
        const Point prev = v[(k + m - 1) % m], next = v[(k + 1) % m];
        const Point e_in = prev - v[k], e_out = next - v[k];
        // counter-clockwise sweep from the outgoing edge to the incoming edge
        double a = std::atan2(cross(e_out, e_in), dot(e_out, e_in));
        if (a <= 0) a += kTwoPi;
        angles[k] = a;
    }
    return angles;
}

PolygonDomain::PolygonDomain(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    const std::size_t m = vertices_.size();
    require(m >= 3, "polygon needs at least three vertices");
    double area2 = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const Point a = vertices_[k], b = vertices_[(k + 1) % m];
        require(norm(b - a) > 0, "polygon has a zero-length edge");
        area2 += cross(a, b);
    }
    require(area2 != 0, "polygon is degenerate");
    if (area2 < 0) std::reverse(vertices_.begin(), vertices_.end());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == m - 1);
            if (adjacent) continue;
            if (segments_intersect(vertices_[i], vertices_[(i + 1) % m], vertices_[j],
                                   vertices_[(j + 1) % m]))
                throw ValidationError("polygon is not simple (edges " + std::to_string(i) +
                                      " and " + std::to_string(j) + " intersect)");
        }
    }
    angles_ = polygon_interior_angles(vertices_);
    lo_ = hi_ = vertices_.front();
    for (const Point& p : vertices_) {
        lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
        hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
    }
}

double PolygonDomain::max_interior_angle() const {
    return *std::max_element(angles_.begin(), angles_.end());
}

double PolygonDomain::boundary_distance(Point x) const {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t m = vertices_.size();
    for (std::size_t k = 0; k < m; ++k)
        best = std::min(best, segment_distance(x, vertices_[k], vertices_[(k + 1) % m]));
    return best;
}

bool PolygonDomain::contains(Point x) const {
    bool in = false;
    const std::size_t m = vertices_.size();
    for (std::size_t k = 0, l = m - 1; k < m; l = k++) {
        const Point a = vertices_[k], b = vertices_[l];
        if ((a.y > x.y) != (b.y > x.y)) {
            const double xc = a.x + (x.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x.x < xc) in = !in;
        }
    }
    if (!in) return false;
    const double scale = std::max(hi_.x - lo_.x, hi_.y - lo_.y);
    return boundary_distance(x) > 1e-13 * scale;
}

double PolygonDomain::rho(Point x) const {
    if (!contains(x)) throw DomainMembershipError("point is not strictly inside the polygon");
    return boundary_distance(x);
}

double PolygonDomain::rho_vertex(Point x) const {
    if (!contains(x)) throw DomainMembershipError("point is not strictly inside the polygon");
    double best = std::numeric_limits<double>::infinity();
    for (const Point& p : vertices_) best = std::min(best, norm(x - p));
    return best;
}

double rho(const WedgeDomain& domain, Point x) { return domain.rho(x); }
double rho(const PolygonDomain& domain, Point x) { return domain.rho(x); }
double rho_vertex(const WedgeDomain& domain, Point x) { return domain.rho_vertex(x); }
double rho_vertex(const PolygonDomain& domain, Point x) { return domain.rho_vertex(x); }

PolarGrid build_polar_grid(const WedgeDomain& domain, int n_r, int n_eta, double grading) {
    require(n_r >= 4 && n_eta >= 4, "polar grid needs n_r, n_eta >= 4");
    require(grading >= 1, "radial grading exponent must be >= 1");
    PolarGrid g{domain, {}, {}, grading};
    g.r.resize(n_r);
    for (int i = 1; i <= n_r; ++i)
        g.r[i - 1] = domain.r_max() * std::pow(static_cast<double>(i) / n_r, grading);
    g.r.back() = domain.r_max();
    g.eta.resize(n_eta + 1);
    for (int j = 0; j <= n_eta; ++j) g.eta[j] = domain.kappa() * j / n_eta;
    g.eta.back() = domain.kappa();
    return g;
}

CartesianGrid build_cartesian_grid(const PolygonDomain& domain, double h) {
    require(h > 0, "lattice spacing must be positive");
    const Point lo = domain.bbox_min(), hi = domain.bbox_max();
    CartesianGrid g{domain, lo, h, 0, 0, {}};
    g.nx = static_cast<int>(std::ceil((hi.x - lo.x) / h - 1e-9));
    g.ny = static_cast<int>(std::ceil((hi.y - lo.y) / h - 1e-9));
    require(g.nx >= 4 && g.ny >= 4, "lattice spacing too coarse for the polygon");
    g.inside.assign(g.size(), 0);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            g.inside[g.index(i, j)] = domain.contains(g.node(i, j)) ? 1 : 0;
    return g;
}

std::size_t grid_size(const Grid& grid) {
    return std::visit([](const auto& g) { return g.size(); }, grid);
}

std::vector<Point> grid_nodes(const Grid& grid) {
    std::vector<Point> out(grid_size(grid));
    if (const auto* pg = std::get_if<PolarGrid>(&grid)) {
        for (int i = 0; i < pg->n_r(); ++i)
            for (int j = 0; j <= pg->n_eta(); ++j) out[pg->index(i, j)] = pg->node(i, j);
    } else {
        const auto& cg = std::get<CartesianGrid>(grid);
        for (int j = 0; j <= cg.ny; ++j)
            for (int i = 0; i <= cg.nx; ++i) out[cg.index(i, j)] = cg.node(i, j);
    }
    return out;
}

std::vector<unsigned char> grid_boundary_mask(const Grid& grid) {
    std::vector<unsigned char> mask(grid_size(grid), 0);
    if (const auto* pg = std::get_if<PolarGrid>(&grid)) {
        for (int i = 0; i < pg->n_r(); ++i)
            for (int j = 0; j <= pg->n_eta(); ++j) mask[pg->index(i, j)] = pg->is_boundary(i, j);
    } else {
        const auto& cg = std::get<CartesianGrid>(grid);
        for (std::size_t k = 0; k < mask.size(); ++k) mask[k] = cg.inside[k] ? 0 : 1;
    }
    return mask;
}

}  // namespace conic
