#include "conic_spde/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "conic_spde/errors.hpp"

namespace conic {

namespace {

#include "debye_coefficients.inc"

constexpr double kSeriesLimit = 30.0;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Positive-term power series, summed relative to its first term so that the
// exponential scaling is applied once in log space.
double series(double nu, double z) {
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 100000; ++k) {
        term *= q / (k * (k + nu));
        sum += term;
        if (term < 0.25 * kEps * sum && k > 0.5 * z) break;
    }
    const double log_prefactor = nu * std::log(0.5 * z) - std::lgamma(nu + 1.0) - z;
    return std::exp(log_prefactor + std::log(sum));
}

// exp(-z) I_nu(z) ~ (2 pi z)^{-1/2} sum_k (-1)^k a_k(nu) / z^k; the
// exponentially small companion term is below e^{-2z} relative.
double hankel(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0, last = 1.0;
    for (int k = 1; k < 400; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * z);
        const double mag = std::abs(term);
        if (k > 1 && mag > last && odd * odd > mu) break;  // past the smallest term
        sum += term;
        last = mag;
        if (mag < 0.25 * kEps * std::abs(sum)) break;
    }
    return sum / std::sqrt(kTwoPi * z);
}

// Uniform expansion in 1/nu. The exponent nu * eta(z / nu) - z is written in a
// cancellation-free form.
double debye(double nu, double z) {
    const double root = std::sqrt(nu * nu + z * z);
    const double p = nu / root;
    const double exponent = nu * nu / (root + z) - nu * std::asinh(nu / z);
    const double p2 = p * p;
    double sum = 0.0, inv_pow = 1.0, p_pow = 1.0;
    for (int k = 0; k < kDebyeTerms; ++k) {
        // u_k(p) = p^k * sum_i c_i p^{2i}
        double poly = 0.0;
        for (int i = k; i >= 0; --i) poly = poly * p2 + kDebyeCoefficients[k][i];
        const double contribution = p_pow * poly * inv_pow;
        sum += contribution;
        if (k > 2 && std::abs(contribution) < 0.25 * kEps * std::abs(sum)) break;
        inv_pow /= nu;
        p_pow *= p;
    }
    return std::exp(exponent) * sum / (std::sqrt(kTwoPi) * std::sqrt(root));
}

}  // namespace

double scaled_bessel_i(double nu, double z) {
    if (!(nu >= 0) || !(z >= 0)) throw ValidationError("scaled_bessel_i needs nu >= 0 and z >= 0");
    if (z == 0) return nu == 0 ? 1.0 : 0.0;
    if (z <= kSeriesLimit) return series(nu, z);
    if (nu * nu <= 9.0 * z) return hankel(nu, z);
    return debye(nu, z);
}

double scaled_bessel_i_derivative(double nu, double z) {
    if (z == 0) {
        if (nu == 1) return 0.5;
        return nu == 0 ? 0.0 : (nu < 1 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    return scaled_bessel_i(nu + 1.0, z) + (nu / z) * scaled_bessel_i(nu, z);
}

}  // namespace conic
