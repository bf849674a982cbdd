#pragma once

/**
 * @file rng.hpp
 * @brief Splittable counter-based pseudo-random generator.
 *
 * One 64-bit master seed reproduces every draw of a run.  The generator is
 * counter-based (output i is a pure function of (key, i)), so independent
 * streams for workers, samples, or batches are derived by index instead of by
 * sharing mutable state — results are bit-identical no matter how work is
 * scheduled across threads.
 */

#include <cstdint>

namespace bullets {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6A09E667F3BCC909ull)) {}

    /// Stateless 64-bit mixer (splitmix64 finalizer).
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Independent stream for a worker/sample/batch index.
    Rng derive(std::uint64_t stream) const {
        Rng r(0);
        r.key_ = mix(key_ ^ mix(stream ^ 0xA5A5A5A5A5A5A5A5ull));
        r.ctr_ = 0;
        return r;
    }

    std::uint64_t u64() { return mix(key_ + 0x9E3779B97F4A7C15ull * ++ctr_); }

    /// Uniform double in [0, 1) with 53 random bits (an exact dyadic value).
    double unit() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased (rejection on the top band).
    std::uint64_t below(std::uint64_t n) {
        __uint128_t m = static_cast<__uint128_t>(u64()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            std::uint64_t floor = (0 - n) % n;
            while (lo < floor) {
                m = static_cast<__uint128_t>(u64()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// True with probability 1/m (m >= 1), up to O(m / 2^64) bias.
    bool bernoulli_inv(std::uint64_t m) {
        return (static_cast<__uint128_t>(u64()) * m >> 64) == 0;
    }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

} // namespace bullets
