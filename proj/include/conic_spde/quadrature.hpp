#pragma once

#include <vector>

namespace conic {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels of
/// `order` points each; order is one of 7, 10, 15, 20, 30.
QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order = 10);

}  // namespace conic
