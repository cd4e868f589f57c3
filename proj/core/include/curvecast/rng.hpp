#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace curvecast {

/// Counter-based deterministic random stream (splitmix64 core).
///
/// A stream is addressed by a master seed plus up to three key words, so
/// independent work items (bootstrap replicate, horizon, component) can draw
/// from their own stream regardless of execution order or thread count.
/// All derived quantities (uniform doubles, index draws, normals) use fixed
/// algorithms rather than std:: distributions, so byte-identical output is
/// reproducible across platforms and standard libraries.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed,
                       std::uint64_t k1 = 0, std::uint64_t k2 = 0, std::uint64_t k3 = 0) {
        state_ = seed;
        absorb(k1 + 0x243F6A8885A308D3ULL);
        absorb(k2 + 0x13198A2E03707344ULL);
        absorb(k3 + 0xA4093822299F31D0ULL);
        has_cached_normal_ = false;
        cached_normal_ = 0.0;
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n). Multiply-shift map, no rejection: bias is
    /// below 2^-64 for any n that fits in memory.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller (pairs cached within the stream).
    double next_normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = next_double();
        double u2 = next_double();
        // avoid log(0)
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        cached_normal_ = r * std::sin(a);
        has_cached_normal_ = true;
        return r * std::cos(a);
    }

private:
    void absorb(std::uint64_t key) {
        state_ ^= key;
        (void)next_u64();
    }

    std::uint64_t state_;
    double cached_normal_;
    bool has_cached_normal_;
};

}  // namespace curvecast
