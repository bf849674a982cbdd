#pragma once

/**
 * @file engine.hpp
 * @brief Collision resolution: turn a shot sequence into the true space-time
 *        diagram (death times, collision matching, survivor set).
 *
 * Two resolution engines compute the same diagram:
 *   - resolve(): event-driven, O(n log n).  Only spatially adjacent live
 *     bullets can collide first, so it maintains a doubly-linked live list in
 *     front-to-back order plus a min-heap of adjacent-pair meeting times with
 *     lazy invalidation.
 *   - resolve_naive(): the literal iterative minimum-scan over all live
 *     pairs, O(n^3).  Retained as the test oracle for the fast engine.
 *
 * Both engines detect singular inputs (a bullet in two simultaneous
 * minimizing pairs — equivalently three live trajectories through one point)
 * and throw SingularParameter instead of picking an order.
 */

#include <optional>
#include <vector>

#include "bullets/geometry.hpp"
#include "bullets/rational.hpp"

namespace bullets {

/// Problem parameter: sorted speeds and the multiset of delays.
struct Parameter {
    std::vector<Rat> speeds; ///< strictly increasing, all ≥ 0
    std::vector<Rat> delays; ///< n−1 values, all > 0

    int n() const { return static_cast<int>(speeds.size()); }

    /// Throws Invalid naming the offending field.
    void validate() const;
};

/// A configuration: which speed is shot in which slot (sigma) and which delay
/// separates consecutive shots (tau).  Both 0-based permutations.
struct Configuration {
    std::vector<int> sigma; ///< permutation of {0..n−1}
    std::vector<int> tau;   ///< permutation of {0..n−2}

    void validate(int n) const;
};

/// One bullet in shot order.
struct Shot {
    Rat birth;
    Rat speed;
};

using ShotSequence = std::vector<Shot>;

/// Throws Invalid (births not strictly increasing) or EqualSpeeds
/// (duplicate speed) when the sequence is malformed.
void validate_shots(const ShotSequence& shots);

/// The resolved fate of every bullet.
struct Diagram {
    struct Bullet {
        Rat birth;
        Rat speed;
        ExtTime death = ExtTime::infinity();
        int partner = -1;  ///< index of the bullet it dies with, or −1
        Rat death_position; ///< meaningful only when death is finite
    };

    std::vector<Bullet> bullets;
    std::vector<int> survivors; ///< ascending bullet indices with death = ∞

    int n() const { return static_cast<int>(bullets.size()); }
    int survivor_count() const { return static_cast<int>(survivors.size()); }
};

/// Event-driven resolution (validates the input).
Diagram resolve(const ShotSequence& shots);

/// Literal all-pairs minimum scan (validates the input); the test oracle.
Diagram resolve_naive(const ShotSequence& shots);

/// Birth times as prefix sums of permuted delays (first shot at time 0),
/// speeds permuted by sigma.
ShotSequence realize(const Parameter& p, const Configuration& c);

/// |S_j| for j = 1..n: survivor count of the first j bullets, each prefix
/// resolved independently (prefixes run in parallel when OpenMP threads are
/// available; the result does not depend on the thread count).
std::vector<int> survivor_trajectory(const std::vector<Rat>& speeds,
                                     const std::vector<Rat>& delays, int n);

namespace detail {
/// Event-driven engine without input validation, for hot loops whose inputs
/// are valid by construction (realized configurations, checked streams).
Diagram resolve_unchecked(const Shot* shots, int n);
} // namespace detail

} // namespace bullets
