#include "conic_spde/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include "conic_spde/errors.hpp"

namespace conic {

namespace {

template <unsigned N>
void append_panels(double a, double b, int panels, QuadratureRule& out) {
    using rule = boost::math::quadrature::gauss<double, N>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width, half = 0.5 * width;
        // Boost stores the non-negative half of the symmetric rule; x[0] = 0 for odd N
        for (std::size_t k = x.size(); k-- > 0;) {
            if (x[k] == 0) continue;
            out.nodes.push_back(mid - half * x[k]);
            out.weights.push_back(half * w[k]);
        }
        for (std::size_t k = 0; k < x.size(); ++k) {
            out.nodes.push_back(mid + half * x[k]);
            out.weights.push_back(half * w[k]);
        }
    }
}

}  // namespace

QuadratureRule composite_gauss_legendre(double a, double b, int panels, int order) {
    require(b > a && panels >= 1, "quadrature needs b > a and at least one panel");
    QuadratureRule out;
    switch (order) {
        case 7: append_panels<7>(a, b, panels, out); break;
        case 10: append_panels<10>(a, b, panels, out); break;
        case 15: append_panels<15>(a, b, panels, out); break;
        case 20: append_panels<20>(a, b, panels, out); break;
        case 30: append_panels<30>(a, b, panels, out); break;
        default: throw ValidationError("Gauss-Legendre order must be one of 7, 10, 15, 20, 30");
    }
    return out;
}

}  // namespace conic
