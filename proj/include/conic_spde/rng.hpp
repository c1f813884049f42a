#pragma once

#include <array>
#include <cstdint>

namespace conic {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key);

/// Counter-based stream identified by (seed, a, b). Streams with different
/// identifiers are independent and can be generated in any order.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint32_t a, std::uint32_t b);

    std::uint32_t next_u32();
    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal by Box-Muller.
    double normal();

private:
    void refill();

    PhiloxKey key_;
    std::uint32_t a_, b_;
    std::uint64_t block_ = 0;
    PhiloxBlock buffer_{};
    int used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace conic
