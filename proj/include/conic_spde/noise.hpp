#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace conic {

/// Truncated family of independent Wiener processes sampled on a uniform
/// time grid. Increments are stored row-major [step][mode].
struct WienerPath {
    std::uint64_t seed = 0;
    std::uint32_t trial = 0;
    int K = 0;
    int n_steps = 0;
    double dt = 0.0;
    std::vector<double> increments;

    double dw(int step, int mode) const { return increments[static_cast<std::size_t>(step) * K + mode]; }
    /// Path on the grid with step factor * dt: consecutive increments summed.
    WienerPath coarsen(int factor) const;
};

/// Mode k of trial i is drawn from the counter-based substream (seed, i, k).
WienerPath sample_wiener(std::uint64_t seed, int K, int n_steps, double dt, std::uint32_t trial = 0);

/// Raw little-endian float64 dump, row-major [step][mode].
void write_increments(const WienerPath& path, const std::string& file);
WienerPath read_increments(const std::string& file, int K, double dt);

/// Symmetric 2x2 matrix [a11 a12; a12 a22].
struct Matrix2 {
    double a11 = 1.0;
    double a12 = 0.0;
    double a22 = 1.0;

    friend bool operator==(const Matrix2&, const Matrix2&) = default;
    double min_eigenvalue() const;
    double max_eigenvalue() const;
    bool is_scalar() const { return a12 == 0.0 && a11 == a22; }
};

enum class CoefficientKind { constant, piecewise_constant_random, oscillating };

std::string to_string(CoefficientKind kind);
CoefficientKind coefficient_kind_from_string(const std::string& name);

/// Realisation of t -> a(t) on [0, T]. Piecewise-constant paths switch at
/// equally spaced times; oscillating paths are midpoint * I + amplitude *
/// sin(omega t) * direction with the spectrum of `direction` in [-1, 1].
class CoefficientPath {
public:
    static CoefficientPath constant(const Matrix2& a);
    static CoefficientPath piecewise(std::vector<double> switch_times, std::vector<Matrix2> segments, double nu1,
                                     double nu2);
    static CoefficientPath oscillating(double nu1, double nu2, double omega, const Matrix2& direction);

    CoefficientKind kind() const { return kind_; }
    double nu1() const { return nu1_; }
    double nu2() const { return nu2_; }
    const std::vector<double>& switch_times() const { return switch_times_; }
    const std::vector<Matrix2>& segments() const { return segments_; }
    double omega() const { return omega_; }
    const Matrix2& direction() const { return direction_; }

    Matrix2 at(double t) const;
    /// a(t) = alpha(t) I for every t.
    bool isotropic() const;
    /// Integral of the scalar multiplier alpha over [s, t]; requires isotropic().
    double integrated_scalar(double s, double t) const;

private:
    CoefficientKind kind_ = CoefficientKind::constant;
    double nu1_ = 1.0, nu2_ = 1.0;
    std::vector<double> switch_times_{0.0};
    std::vector<Matrix2> segments_{Matrix2{}};
    double omega_ = 0.0;
    Matrix2 direction_{0.0, 0.0, 0.0};
};

/// Draws a path satisfying nu1 |xi|^2 <= a xi.xi <= nu2 |xi|^2. For the
/// piecewise kind each segment is R diag(m1, m2) R^T with m uniform in
/// [nu1, nu2] and R uniform; for the oscillating kind n_switches is the number
/// of periods on [0, T].
CoefficientPath sample_coefficients(std::uint64_t seed, CoefficientKind kind, double nu1, double nu2, double T,
                                    int n_switches, std::uint32_t trial = 0);

}  // namespace conic
