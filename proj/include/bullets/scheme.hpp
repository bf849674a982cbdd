#pragma once

/**
 * @file scheme.hpp
 * @brief Genericity certification and the sign table of a configuration.
 *
 * A parameter is *generic* when, in every configuration, no three virtual
 * trajectories pass through one point.  Genericity is certified by scanning
 * for *critical patterns*: a triple of speeds together with two disjoint
 * delay subsets whose induced half-lines are concurrent.  The parameter is
 * singular precisely when such a pattern exists, which is exponentially
 * cheaper to decide than scanning all n!·(n−1)! configurations.
 *
 * For a generic parameter and a fixed configuration, the *sign table*
 * records, for every ordered pair of trajectories that virtually collide,
 * the side of their meeting point relative to every other trajectory's
 * supporting line.  That table alone determines the surviving bullets; the
 * recursive decision procedure is implemented here verbatim and serves as
 * an independent oracle for the collision engine.
 */

#include <vector>

#include "bullets/engine.hpp"

namespace bullets {

/// Witness of singularity: three distinct speeds and two disjoint delay
/// subsets whose half-lines HL(v_m, 0), HL(v_l, d_l), HL(v_r, d_l + d_r)
/// pass through one point.
struct CriticalPattern {
    Rat v_m; ///< speed of the first-shot bullet, through the origin
    Rat v_l; ///< speed of the left bullet, shot after delay d_l
    Rat v_r; ///< speed of the right bullet, shot after delay d_l + d_r
    Rat d_l;
    Rat d_r;
    std::vector<int> left_indices;  ///< delay indices summing to d_l (0-based)
    std::vector<int> right_indices; ///< delay indices summing to d_r (0-based)
    Rat triple_height;              ///< spatial height of the common point
    bool minimal = false;           ///< both delay subsets are single indices
};

/// Exhaustive scan over all ordered speed triples and all ordered pairs of
/// disjoint nonempty delay-index subsets (3^{n−1} pairs).  Returns every
/// concurrent combination, in a deterministic order independent of thread
/// count.  Throws SizeLimit when n exceeds `exhaustive_bound`.
std::vector<CriticalPattern> find_critical_patterns(const Parameter& p, int exhaustive_bound = 12);

/// True iff find_critical_patterns(p) is empty.
bool is_generic(const Parameter& p, int exhaustive_bound = 12);

/// Sign table of one configuration.  For shot indices i < j and k ∉ {i, j}:
/// entry 0 when trajectories i and j never meet, otherwise ±1 for the
/// meeting point lying strictly above/below the supporting line of k.
/// With exactly two bullets there is no third line; a single existence bit
/// is kept instead.
class TcsTable {
  public:
    TcsTable(int n, std::vector<signed char> signs) : n_(n), signs_(std::move(signs)) {}

    int n() const { return n_; }

    /// Entry for the meeting point of i and j against line k; symmetric in
    /// i ↔ j.  Requires n ≥ 3 and pairwise-distinct indices.
    int entry(int i, int j, int k) const;

    /// Whether trajectories i and j meet at all (any k answers this, since
    /// an entry is 0 exactly when the meeting point is absent).
    bool pair_collides(int i, int j) const;

    friend bool operator==(const TcsTable& a, const TcsTable& b) {
        return a.n_ == b.n_ && a.signs_ == b.signs_;
    }
    friend bool operator!=(const TcsTable& a, const TcsTable& b) { return !(a == b); }

  private:
    int n_;
    std::vector<signed char> signs_; ///< dense (i<j pair rank) × k; n=2 keeps one bit
};

/// Builds the sign table of configuration c under parameter p.  Requires a
/// generic parameter; a zero side encountered during the computation is
/// proof of a triple point in this very configuration and raises NotGeneric.
TcsTable compute_tcs(const Parameter& p, const Configuration& c);

/// Decides the surviving bullets from the sign table alone, by the
/// recursion on the least live index: if its row is identically zero it
/// survives and the rest recurse; otherwise the least J whose meeting point
/// with it lies above every other live line either survives its inner block
/// {least+1..J} (then the two collide and {J+1..} recurses) or dies inside
/// it (then J and its inner partner are removed and the rest recurses).
/// Throws RecursionStuck if no such J exists while the row is nonzero.
std::vector<int> survivors_from_tcs(const TcsTable& t);

} // namespace bullets
