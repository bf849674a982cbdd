#pragma once

/**
 * @file enumeration.hpp
 * @brief Exact brute-force survivor distributions over configuration spaces.
 *
 * Two enumeration families:
 *
 *  - The unconstrained sweep resolves every configuration (σ, τ) of a fixed
 *    generic parameter and tallies survivor counts.  The survivor-count
 *    histogram divided by n!·(n−1)! is the exact law q_n — for every
 *    generic parameter — which desk-scale sweeps here verify directly.
 *
 *  - The constrained Left/Right sweeps place one distinguished bullet at an
 *    end of a distinguished delay Δ*, remove the opposite end's bullet, and
 *    filter configurations by how many true trajectories cross a special
 *    segment S on the line the right bullet would fly.  The per-k tallies
 *    of the two sides coincide; that equality is the combinatorial heart of
 *    the law's parameter-independence, checked here by counting.
 *
 * Sweeps split the permutation space into contiguous chunks through
 * factorial-number-system unranking; chunk tallies merge by commutative
 * integer addition, so results are bit-identical for any worker count.
 * A plain serial sweep is kept as a reference implementation for tests and
 * benchmarks.
 */

#include <map>
#include <vector>

#include "bullets/engine.hpp"

namespace bullets {

/// Histogram of survivor counts over an enumerated configuration space.
struct CountTable {
    std::map<int, long long> count; ///< k → number of tallied configurations
    long long total = 0;            ///< Σ count(k)

    friend bool operator==(const CountTable& a, const CountTable& b) {
        return a.total == b.total && a.count == b.count;
    }
    friend bool operator!=(const CountTable& a, const CountTable& b) { return !(a == b); }
};

/// Writes the permutation of {0..m−1} with lexicographic rank `rank`
/// (factorial number system).  rank must lie in [0, m!).
void unrank_permutation(long long rank, int m, std::vector<int>& out);

/// m! as a long long (m ≤ 20).
long long factorial(int m);

/// Resolves all n!·(n−1)! configurations of a generic parameter and tallies
/// survivor counts.  Throws NotGeneric (with the parameter left unswept) and
/// SizeLimit above `exhaustive_bound`.
CountTable enumerate_ff(const Parameter& p, int exhaustive_bound = 7);

/// Reference implementation of enumerate_ff: single-threaded, public-API
/// resolution, straightforward nested permutation loops.
CountTable enumerate_ff_serial(const Parameter& p, int exhaustive_bound = 7);

/// Per-speed survival tallies over the same sweep: entry i is the number of
/// configurations in which the bullet carrying speed p.speeds[i] survives.
std::vector<long long> speed_survival_counts(const Parameter& p, int exhaustive_bound = 7);

/// Which crossing counts a constrained configuration must have to be
/// tallied: exactly zero, anything, or at least one.
enum class CrossingFilter { Zero, AllNonneg, Positive };

enum class ConstrainedSide { Left, Right };

/// Parameter of the constrained counting models.  Of n speeds, two are
/// distinguished (v_min and v_r, with v_min < v_r); of n−1 delays, one is
/// distinguished (Δ*, carried as the last delay index).  The segment S
/// lives on the line a bullet of speed v_r shot at the right end of Δ*
/// would fly, spanning heights [0, s]; s may not exceed the height H at
/// which that line meets the one of v_min shot at the left end.
struct ConstrainedParameter {
    std::vector<Rat> free_speeds; ///< the n−2 undistinguished speeds
    Rat v_min;
    Rat v_r;
    std::vector<Rat> free_delays; ///< the n−2 undistinguished delays
    Rat delta_star;
    Rat s;
    CrossingFilter filter = CrossingFilter::AllNonneg;

    int n() const { return static_cast<int>(free_speeds.size()) + 2; }
    void validate() const;
};

/// Height at which the two distinguished virtual lines meet:
/// H = v_min·v_r·Δ* / (v_r − v_min).
Rat intersection_height(const ConstrainedParameter& cp);

/// Sweeps all (n−2)!·(n−1)! constrained configurations of one side.  For
/// each: place the distinguished bullet (v_min at the left end of Δ* for
/// Left, v_r at the right end for Right — the opposite end stays empty),
/// resolve, count true-trajectory crossings of S, and tally the survivor
/// count when the crossing count passes the filter.  The distinguished
/// bullet itself never counts as crossing.  Throws DegenerateConstraint
/// when a trajectory endpoint lies exactly on S (other than a collision
/// with the segment's own bullet), SingularParameter on a collision tie,
/// SizeLimit above `exhaustive_bound`.
CountTable enumerate_constrained(const ConstrainedParameter& cp, ConstrainedSide side,
                                 int exhaustive_bound = 6);

} // namespace bullets
