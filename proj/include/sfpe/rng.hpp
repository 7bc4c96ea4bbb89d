#pragma once

#include <cmath>
#include <cstdint>

namespace sfpe::rng {

// Philox 4x32-10 counter-based generator. Every draw is a pure function of
// (seed, k0, k1, k2, k3), so parallel code gets identical streams no matter
// how work is scheduled.

namespace detail {

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
}

struct Block {
    uint32_t v[4];
};

inline Block philox4x32(uint64_t seed, uint64_t c01, uint64_t c23) {
    constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    uint32_t k0 = static_cast<uint32_t>(seed);
    uint32_t k1 = static_cast<uint32_t>(seed >> 32);
    uint32_t x0 = static_cast<uint32_t>(c01);
    uint32_t x1 = static_cast<uint32_t>(c01 >> 32);
    uint32_t x2 = static_cast<uint32_t>(c23);
    uint32_t x3 = static_cast<uint32_t>(c23 >> 32);
    for (int round = 0; round < 10; ++round) {
        uint32_t hi0, lo0, hi1, lo1;
        mulhilo(M0, x0, hi0, lo0);
        mulhilo(M1, x2, hi1, lo1);
        uint32_t y0 = hi1 ^ x1 ^ k0;
        uint32_t y1 = lo1;
        uint32_t y2 = hi0 ^ x3 ^ k1;
        uint32_t y3 = lo0;
        x0 = y0; x1 = y1; x2 = y2; x3 = y3;
        k0 += W0; k1 += W1;
    }
    return Block{{x0, x1, x2, x3}};
}

inline double u01(uint32_t hi, uint32_t lo) {
    // 53-bit mantissa from two words, value in [0, 1).
    uint64_t bits = (static_cast<uint64_t>(hi) << 21) ^ (static_cast<uint64_t>(lo) >> 11);
    bits &= (uint64_t(1) << 53) - 1;
    return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace detail

// Two independent uniforms in [0, 1) for one key tuple.
inline void uniform_pair(uint64_t seed, uint64_t k0, uint64_t k1, uint64_t k2, uint64_t k3,
                         double& u0, double& u1) {
    // Mix the two trailing keys into one 64-bit counter word.
    uint64_t c23 = k2 * 0x9E3779B97F4A7C15ull + k3 + 0x2545F4914F6CDD1Dull * (k3 >> 7 | k3 << 57);
    detail::Block b = detail::philox4x32(seed, k0 ^ (k1 << 32 | k1 >> 32), c23 ^ k1);
    u0 = detail::u01(b.v[0], b.v[1]);
    u1 = detail::u01(b.v[2], b.v[3]);
}

inline double uniform(uint64_t seed, uint64_t k0, uint64_t k1 = 0, uint64_t k2 = 0, uint64_t k3 = 0) {
    double a, b;
    uniform_pair(seed, k0, k1, k2, k3, a, b);
    return a;
}

// Standard normal pair via Box-Muller.
inline void normal_pair(uint64_t seed, uint64_t k0, uint64_t k1, uint64_t k2, uint64_t k3,
                        double& z0, double& z1) {
    double u, v;
    uniform_pair(seed, k0, k1, k2, k3, u, v);
    double r = std::sqrt(-2.0 * std::log1p(-u));  // u in [0,1) => 1-u in (0,1]
    double a = 6.283185307179586476925286766559 * v;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
}

inline double normal(uint64_t seed, uint64_t k0, uint64_t k1 = 0, uint64_t k2 = 0, uint64_t k3 = 0) {
    double a, b;
    normal_pair(seed, k0, k1, k2, k3, a, b);
    return a;
}

}  // namespace sfpe::rng
