#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace detkit {

// splitmix64; used only to derive well-separated per-stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic random stream.  mt19937_64's output sequence is pinned by the
// standard, and the uniform/normal transforms below are fixed arithmetic, so
// a (seed, stream) pair yields the same draws on any platform with IEEE
// doubles.  The library never uses std::uniform_real_distribution or
// std::normal_distribution, whose outputs are implementation-defined.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : eng_(mix64(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

    // Uniform on [0, 1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; draws two uniforms per pair and caches
    // the second deviate.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace detkit
