#pragma once

namespace conic {

/// exp(-z) * I_nu(z) for real order nu >= 0 and z >= 0.
///
/// Power series for z <= 30, the large-argument (Hankel) expansion when
/// nu^2 <= 9 z, and the uniform large-order (Debye) expansion otherwise.
/// Relative error is below 1e-12 wherever the result is a normal double.
double scaled_bessel_i(double nu, double z);

/// exp(-z) * dI_nu/dz (z), from I'_nu = I_{nu+1} + (nu / z) I_nu.
double scaled_bessel_i_derivative(double nu, double z);

}  // namespace conic
