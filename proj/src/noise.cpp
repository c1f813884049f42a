#include "conic_spde/noise.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include "conic_spde/errors.hpp"
#include "conic_spde/geometry.hpp"
#include "conic_spde/rng.hpp"

namespace conic {

namespace {

// Coefficient draws use stream ids disjoint from the Wiener modes.
constexpr std::uint32_t kCoefficientStream = 0xC0EF0000u;

}  // namespace

WienerPath WienerPath::coarsen(int factor) const {
    require(factor >= 1 && n_steps % factor == 0, "coarsening factor must divide the number of steps");
    WienerPath out{seed, trial, K, n_steps / factor, dt * factor, {}};
    out.increments.assign(static_cast<std::size_t>(out.n_steps) * K, 0.0);
    for (int j = 0; j < n_steps; ++j)
        for (int k = 0; k < K; ++k) out.increments[static_cast<std::size_t>(j / factor) * K + k] += dw(j, k);
    return out;
}

WienerPath sample_wiener(std::uint64_t seed, int K, int n_steps, double dt, std::uint32_t trial) {
    require(K >= 0 && n_steps >= 1, "Wiener path needs K >= 0 and n_steps >= 1");
    require(dt > 0, "Wiener path needs dt > 0");
    WienerPath path{seed, trial, K, n_steps, dt, {}};
    path.increments.resize(static_cast<std::size_t>(K) * n_steps);
    const double scale = std::sqrt(dt);
    for (int k = 0; k < K; ++k) {
        RandomStream stream(seed, trial, static_cast<std::uint32_t>(k));
        for (int j = 0; j < n_steps; ++j) path.increments[static_cast<std::size_t>(j) * K + k] = scale * stream.normal();
    }
    return path;
}

void write_increments(const WienerPath& path, const std::string& file) {
    static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + file + " for writing");
    out.write(reinterpret_cast<const char*>(path.increments.data()),
              static_cast<std::streamsize>(path.increments.size() * sizeof(double)));
}

WienerPath read_increments(const std::string& file, int K, double dt) {
    require(K >= 1 && dt > 0, "replay needs K >= 1 and dt > 0");
    std::ifstream in(file, std::ios::binary | std::ios::ate);
    if (!in) throw ValidationError("cannot open " + file);
    const auto bytes = static_cast<std::size_t>(in.tellg());
    require(bytes % (sizeof(double) * K) == 0, "increment file size is not a multiple of K doubles");
    WienerPath path{0, 0, K, static_cast<int>(bytes / (sizeof(double) * K)), dt, {}};
    path.increments.resize(bytes / sizeof(double));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(path.increments.data()), static_cast<std::streamsize>(bytes));
    return path;
}

double Matrix2::min_eigenvalue() const {
    const double mean = 0.5 * (a11 + a22), radius = std::hypot(0.5 * (a11 - a22), a12);
    return mean - radius;
}

double Matrix2::max_eigenvalue() const {
    const double mean = 0.5 * (a11 + a22), radius = std::hypot(0.5 * (a11 - a22), a12);
    return mean + radius;
}

std::string to_string(CoefficientKind kind) {
    switch (kind) {
        case CoefficientKind::constant: return "constant";
        case CoefficientKind::piecewise_constant_random: return "piecewise-constant-random";
        case CoefficientKind::oscillating: return "oscillating";
    }
    return "constant";
}

CoefficientKind coefficient_kind_from_string(const std::string& name) {
    if (name == "constant") return CoefficientKind::constant;
    if (name == "piecewise-constant-random") return CoefficientKind::piecewise_constant_random;
    if (name == "oscillating") return CoefficientKind::oscillating;
    throw ValidationError("unknown coefficient kind '" + name + "'");
}

CoefficientPath CoefficientPath::constant(const Matrix2& a) {
    require(a.min_eigenvalue() > 0, "coefficient matrix must be positive definite");
    CoefficientPath path;
    path.segments_ = {a};
    path.nu1_ = a.min_eigenvalue();
    path.nu2_ = a.max_eigenvalue();
    return path;
}

CoefficientPath CoefficientPath::piecewise(std::vector<double> switch_times, std::vector<Matrix2> segments,
                                           double nu1, double nu2) {
    require(!segments.empty() && switch_times.size() == segments.size(), "one start time per segment");
    require(switch_times.front() == 0.0, "first segment must start at t = 0");
    require(std::is_sorted(switch_times.begin(), switch_times.end()), "switch times must increase");
    require(nu1 > 0 && nu1 <= nu2, "ellipticity bounds need 0 < nu1 <= nu2");
    for (const auto& m : segments)
        require(m.min_eigenvalue() >= nu1 - 1e-12 && m.max_eigenvalue() <= nu2 + 1e-12,
                "segment matrix violates the ellipticity bounds");
    CoefficientPath path;
    path.kind_ = CoefficientKind::piecewise_constant_random;
    path.switch_times_ = std::move(switch_times);
    path.segments_ = std::move(segments);
    path.nu1_ = nu1;
    path.nu2_ = nu2;
    return path;
}

CoefficientPath CoefficientPath::oscillating(double nu1, double nu2, double omega, const Matrix2& direction) {
    require(nu1 > 0 && nu1 <= nu2, "ellipticity bounds need 0 < nu1 <= nu2");
    require(direction.min_eigenvalue() >= -1 - 1e-12 && direction.max_eigenvalue() <= 1 + 1e-12,
            "oscillation direction must have spectrum in [-1, 1]");
    CoefficientPath path;
    path.kind_ = CoefficientKind::oscillating;
    path.nu1_ = nu1;
    path.nu2_ = nu2;
    path.omega_ = omega;
    path.direction_ = direction;
    const double mid = 0.5 * (nu1 + nu2);
    path.segments_ = {Matrix2{mid, 0.0, mid}};
    return path;
}

Matrix2 CoefficientPath::at(double t) const {
    if (kind_ == CoefficientKind::oscillating) {
        const double mid = 0.5 * (nu1_ + nu2_), amplitude = 0.5 * (nu2_ - nu1_);
        const double w = amplitude * std::sin(omega_ * t);
        return {mid + w * direction_.a11, w * direction_.a12, mid + w * direction_.a22};
    }
    const auto it = std::upper_bound(switch_times_.begin(), switch_times_.end(), t);
    const std::size_t k = it == switch_times_.begin() ? 0 : static_cast<std::size_t>(it - switch_times_.begin()) - 1;
    return segments_[k];
}

bool CoefficientPath::isotropic() const {
    if (kind_ == CoefficientKind::oscillating) return direction_.is_scalar() || nu1_ == nu2_;
    return std::all_of(segments_.begin(), segments_.end(), [](const Matrix2& m) { return m.is_scalar(); });
}

double CoefficientPath::integrated_scalar(double s, double t) const {
    require(isotropic(), "integrated_scalar needs an isotropic coefficient path");
    require(s <= t, "integration bounds must be ordered");
    if (kind_ == CoefficientKind::oscillating) {
        const double mid = 0.5 * (nu1_ + nu2_), amplitude = 0.5 * (nu2_ - nu1_) * direction_.a11;
        if (omega_ == 0.0 || amplitude == 0.0) return mid * (t - s);
        return mid * (t - s) + amplitude * (std::cos(omega_ * s) - std::cos(omega_ * t)) / omega_;
    }
    double total = 0.0;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        const double lo = std::max(s, switch_times_[k]);
        const double hi = k + 1 < segments_.size() ? std::min(t, switch_times_[k + 1]) : t;
        if (hi > lo) total += segments_[k].a11 * (hi - lo);
    }
    return total;
}

CoefficientPath sample_coefficients(std::uint64_t seed, CoefficientKind kind, double nu1, double nu2, double T,
                                    int n_switches, std::uint32_t trial) {
    require(nu1 > 0 && nu1 <= nu2, "ellipticity bounds need 0 < nu1 <= nu2");
    require(T > 0 && n_switches >= 0, "coefficient path needs T > 0 and n_switches >= 0");
    RandomStream stream(seed, trial, kCoefficientStream);
    switch (kind) {
        case CoefficientKind::constant: {
            const double mid = 0.5 * (nu1 + nu2);
            CoefficientPath path = CoefficientPath::constant({mid, 0.0, mid});
            return path;
        }
        case CoefficientKind::piecewise_constant_random: {
            std::vector<double> times;
            std::vector<Matrix2> segments;
            for (int k = 0; k <= n_switches; ++k) {
                times.push_back(T * k / (n_switches + 1));
                // draws for segment k come after those of segments 0..k-1
                const double m1 = stream.uniform(nu1, nu2), m2 = stream.uniform(nu1, nu2);
                const double angle = stream.uniform(0.0, kPi);
                const double c = std::cos(angle), s = std::sin(angle);
                segments.push_back({m1 * c * c + m2 * s * s, (m1 - m2) * c * s, m1 * s * s + m2 * c * c});
            }
            return CoefficientPath::piecewise(std::move(times), std::move(segments), nu1, nu2);
        }
        case CoefficientKind::oscillating: {
            const double angle = stream.uniform(0.0, kPi);
            const double second = stream.uniform(-1.0, 1.0);
            const double c = std::cos(angle), s = std::sin(angle);
            const Matrix2 direction{c * c + second * s * s, (1.0 - second) * c * s, s * s + second * c * c};
            const double omega = 2.0 * kPi * std::max(1, n_switches) / T;
            return CoefficientPath::oscillating(nu1, nu2, omega, direction);
        }
    }
    throw ValidationError("unknown coefficient kind");
}

}  // namespace conic
