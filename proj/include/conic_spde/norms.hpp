#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "conic_spde/exponents.hpp"
#include "conic_spde/geometry.hpp"

namespace conic {

struct WeightParams {
    double p = 2.0;
    double theta = 2.0;
    double Theta = 2.0;
    int m = 0;

    void validate() const;
};

enum class Admissibility { inside, outside, borderline };

std::string to_string(Admissibility a);
/// Borderline means within 1e-9 of an interval end point.
Admissibility classify(const WeightParams& w, const AdmissibleRanges& ranges);

struct NormOptions {
    /// Restrict the integral to rho_o <= max_radius.
    std::optional<double> max_radius;
};

struct NormResult {
    double value = 0.0;
    /// (int |rho^k D^alpha f|^p w dx)^{1/p} summed over |alpha| = k, for k = 0..m.
    std::vector<double> seminorms;
    bool divergence_warning = false;
    std::string warning;
};

/// Midpoint quadrature of sum_{|alpha| <= m} (int |rho^{|alpha|} D^alpha f|^p
/// rho_o^{theta - Theta} rho^{Theta - 2} dx)^{1/p} over grid cells. Nodal
/// values are averaged to cell centres (the vertex counts as a zero node);
/// first derivatives use compact differences at cell centres, second
/// derivatives differentiate second-order nodal gradients.
NormResult k_norm(const GridFunction& u, const WeightParams& w, const NormOptions& options = {});

/// Same quadrature for a function evaluated directly at cell centres, with
/// derivatives by central differences of the function.
NormResult k_norm(const std::function<double(Point)>& f, const Grid& grid, const WeightParams& w,
                  const NormOptions& options = {});

/// Quadrature cells of a grid: centre, area and distances at the centre.
struct Cell {
    Point center;
    double area = 0.0;
    double rho = 0.0;
    double rho_vertex = 0.0;
    /// Corner node indices; -1 marks the vertex of a wedge.
    int corners[4] = {-1, -1, -1, -1};
    bool touches_boundary = false;
    bool touches_vertex = false;
};

std::vector<Cell> quadrature_cells(const Grid& grid);

/// Cell-centre values of |u| and of the Euclidean gradient |grad u| of a nodal function.
struct CellValues {
    std::vector<double> value;
    std::vector<double> grad_x;
    std::vector<double> grad_y;
};

CellValues cell_values(const Grid& grid, const std::vector<Cell>& cells, const std::vector<double>& nodal);

/// Nodal second-order gradient (one-sided at grid edges).
void nodal_gradient(const Grid& grid, const std::vector<double>& u, std::vector<double>& ux, std::vector<double>& uy);

/// max over interior nodes of rho^{k - 1 + Theta/p} rho_o^{(theta - Theta)/p} |D^k u|.
double weighted_sup(const GridFunction& u, int k, const WeightParams& w, const NormOptions& options = {});

struct DilationReport {
    double norm = 0.0;
    double norm_dilated = 0.0;
    double ratio = 0.0;     // norm_dilated / norm
    double expected = 0.0;  // lambda^{-theta/p}
    double relative_error = 0.0;
};

/// ||u(lambda .)|| against lambda^{-theta/p} ||u|| in the order-0 norm.
/// Both u and u(lambda .) must vanish outside r <= r_max / 2 of the grid.
DilationReport dilation_check(const std::function<double(Point)>& u, const Grid& grid, const WeightParams& w,
                              double lambda, double support_radius);

}  // namespace conic
