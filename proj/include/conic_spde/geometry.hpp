#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <variant>
#include <vector>

namespace conic {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Point, Point) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline Point rotate(Point a, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Polar coordinates relative to a wedge: r = |x|, eta in (0, kappa) measured
/// from the first edge.
struct LocalPolar {
    double r = 0.0;
    double eta = 0.0;
};

/// Infinite 2D wedge {r > 0, alpha < arg x < alpha + kappa}, truncated for
/// computation at radius r_max.
class WedgeDomain {
public:
    WedgeDomain(double kappa, double alpha, double r_max);

    double kappa() const { return kappa_; }
    double alpha() const { return alpha_; }
    double r_max() const { return r_max_; }
    /// Direction of the bisector (the "rotation" of the symmetric form
    /// {|arg x - center| < kappa / 2}).
    double bisector_angle() const { return alpha_ + 0.5 * kappa_; }

    /// eta is reduced into [0, 2 pi); points outside the wedge have eta >= kappa.
    LocalPolar to_local(Point x) const;
    Point from_local(double r, double eta) const;

    /// Strictly inside the untruncated wedge.
    bool contains(Point x) const;

    /// Distance to the boundary of the untruncated wedge.
    double rho(Point x) const;
    /// Distance to the vertex.
    double rho_vertex(Point x) const;

    /// Exact boundary distance in local polar coordinates (no membership check).
    double rho_local(double r, double eta) const;

private:
    double kappa_;
    double alpha_;
    double r_max_;
};

/// Axisymmetric spherical cap {polar angle < cap_angle} in S^{d-1}; only used
/// for critical exponents.
struct CapDomainSpec {
    int d = 3;
    double cap_angle = kPi / 2;
};

/// Bounded simple polygon. Vertices are stored counter-clockwise.
class PolygonDomain {
public:
    explicit PolygonDomain(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return vertices_; }
    /// Interior angle at each vertex, in (0, 2 pi).
    const std::vector<double>& interior_angles() const { return angles_; }
    double max_interior_angle() const;

    bool contains(Point x) const;
    double rho(Point x) const;
    double rho_vertex(Point x) const;
    /// Distance to the boundary without a membership check.
    double boundary_distance(Point x) const;

    Point bbox_min() const { return lo_; }
    Point bbox_max() const { return hi_; }

private:
    std::vector<Point> vertices_;
    std::vector<double> angles_;
    Point lo_, hi_;
};

std::vector<double> polygon_interior_angles(const std::vector<Point>& ccw_vertices);

double rho(const WedgeDomain& domain, Point x);
double rho(const PolygonDomain& domain, Point x);
double rho_vertex(const WedgeDomain& domain, Point x);
double rho_vertex(const PolygonDomain& domain, Point x);

/// Tensor polar grid on the truncated wedge. Radial nodes r_1 < ... < r_{n_r}
/// = r_max (the vertex r = 0 is not a node), angular nodes eta_0 = 0 < ... <
/// eta_{n_eta} = kappa.
struct PolarGrid {
    WedgeDomain domain;
    std::vector<double> r;
    std::vector<double> eta;
    double grading = 1.0;

    int n_r() const { return static_cast<int>(r.size()); }
    int n_eta() const { return static_cast<int>(eta.size()) - 1; }
    std::size_t size() const { return r.size() * eta.size(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * eta.size() + j; }
    bool is_boundary(int i, int j) const { return j == 0 || j == n_eta() || i == n_r() - 1; }
    Point node(int i, int j) const { return domain.from_local(r[i], eta[j]); }
    /// Radius of the inner neighbour; 0 (the vertex) for i = 0.
    double r_below(int i) const { return i == 0 ? 0.0 : r[i - 1]; }
};

PolarGrid build_polar_grid(const WedgeDomain& domain, int n_r, int n_eta, double grading);

/// Uniform lattice over the polygon's bounding box; nodes outside the open
/// polygon carry zero Dirichlet data.
struct CartesianGrid {
    PolygonDomain domain;
    Point origin;
    double h = 0.0;
    int nx = 0;  // nodes per row: nx + 1
    int ny = 0;
    std::vector<unsigned char> inside;

    std::size_t size() const { return static_cast<std::size_t>(nx + 1) * (ny + 1); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * (nx + 1) + i; }
    Point node(int i, int j) const { return {origin.x + i * h, origin.y + j * h}; }
    bool is_interior(int i, int j) const { return inside[index(i, j)] != 0; }
};

CartesianGrid build_cartesian_grid(const PolygonDomain& domain, double h);

using Grid = std::variant<PolarGrid, CartesianGrid>;

std::size_t grid_size(const Grid& grid);
/// Coordinates of every node, in storage order.
std::vector<Point> grid_nodes(const Grid& grid);
/// True for nodes where the solution is pinned to zero.
std::vector<unsigned char> grid_boundary_mask(const Grid& grid);

/// Nodal values on a grid.
struct GridFunction {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;
};

}  // namespace conic
