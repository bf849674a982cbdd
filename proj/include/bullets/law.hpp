#pragma once

/**
 * @file law.hpp
 * @brief The exact survivor-count law and its moments.
 *
 * The number of surviving bullets among n follows a distribution q_n
 * characterized by the two-term recurrence
 *
 *     q_N(k) = (1/N)·q_{N−1}(k−1) + (1 − 1/N)·q_{N−2}(k),
 *     q_0(0) = 1,  q_1(1) = 1,
 *
 * computed here in exact rational arithmetic (integer numerator rows over
 * N!).  Moments are available exactly, or through dedicated floating-point
 * linear recurrences that reach n in the millions.  A sequential sampler
 * realizes the matching Markov chain with memory two.
 */

#include <map>
#include <utility>
#include <vector>

#include "bullets/rational.hpp"
#include "bullets/rng.hpp"

namespace bullets {

/// Exact probability law of the survivor count for a fixed n.
struct SurvivorDistribution {
    int n = 0;
    std::map<int, Rat> mass; ///< absent keys carry probability zero

    /// Probability of exactly k survivors.
    Rat operator()(int k) const {
        auto it = mass.find(k);
        return it == mass.end() ? Rat(0) : it->second;
    }
};

/// The law q_n, exact.  n ≥ 0.
SurvivorDistribution q_exact(int n);

/// All laws q_0 .. q_n in one sweep (the recurrence is shared work).
std::vector<SurvivorDistribution> q_exact_upto(int n);

/// Exact mean and variance of q_n.  Materializes the law, so it is bounded:
/// throws SizeLimit when n exceeds `exact_bound`.
std::pair<Rat, Rat> q_moments_exact(int n, int exact_bound = 5000);

struct FloatMoments {
    double mean;
    double variance;
    double skewness; ///< third standardized moment; 0 for degenerate laws
};

/// Mean, variance and skewness of q_n via linear recurrences on the first
/// three raw moments in double precision; O(n) time, usable far beyond the
/// exact-mode bound.
FloatMoments q_moments_float(long n);

/// One draw of the survivor count: the chain
/// X_m = B(1/m)·(1 + X_{m−1}) + (1 − B(1/m))·X_{m−2} realized sequentially
/// for m = 1..n with independent Bernoulli draws.
int sample_markov(int n, Rng& rng);

} // namespace bullets
