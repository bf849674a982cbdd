#pragma once

/**
 * @file models.hpp
 * @brief Samplers for the random bullet models and their combinatorial
 *        equivalents, plus empirical-distribution comparison utilities.
 *
 * Bullet models: random speeds with unit delays (RU), random speeds with
 * random delays (RR), fixed parameter with uniform configuration (FF), and
 * accelerating bullets driven by an impetus vector and a monotone
 * acceleration function (FAF).  FAF is resolved through the exact
 * order-preserving reduction (t, y) → (t, f(y)): collisions of the
 * accelerating problem happen at the same times as those of the linear
 * problem whose speeds are the impetuses, so the survivor set is read off
 * the linear diagram; an audit mode re-evaluates f on the realized
 * collision heights to confirm the order is indeed preserved.
 *
 * Combinatorial equivalents: the sorted bullet flock, odd cycles of a
 * uniform permutation, recursive extremes of a random matrix, and red-edge
 * distances in the two-step tree.  Each produces the same survivor law as
 * the bullet models, which the tests verify by exhaustion where feasible
 * and sampling elsewhere.
 *
 * All randomness flows through the explicit counter-based Rng; random
 * speeds and delays are realized as exact dyadic rationals (the exact
 * values of double-precision draws), so the geometry stays exact and tie
 * events are detectable rather than silent.
 */

#include <cstdint>
#include <utility>
#include <vector>

#include "bullets/engine.hpp"
#include "bullets/law.hpp"
#include "bullets/rng.hpp"

namespace bullets {

/// Source of random speeds or delays, realized as exact rationals.
class SpeedSampler {
public:
    static SpeedSampler uniform01();
    static SpeedSampler exponential(double rate);
    /// Uniform over a user-supplied finite table of values.
    static SpeedSampler table(std::vector<Rat> values);

    /// One draw, exactly as a rational.
    Rat draw(Rng& rng) const;
    /// One strictly positive draw (zero draws are rejected and redrawn).
    Rat draw_positive(Rng& rng) const;
    /// n pairwise-distinct draws; equal repeats are rejected and redrawn.
    std::vector<Rat> draw_distinct(int n, Rng& rng) const;

private:
    enum class Kind { Uniform, Exponential, Table };
    Kind kind_ = Kind::Uniform;
    double rate_ = 1.0;
    std::vector<Rat> values_;
};

/// Survivor count for n bullets with i.i.d. random speeds shot at times
/// 1..n.  Collision ties (probability-zero under exact dyadic draws) are
/// resampled up to a retry cap, then rethrown.
int sample_ru(int n, const SpeedSampler& speeds, Rng& rng);

/// Survivor count with i.i.d. random speeds and i.i.d. positive random
/// delays.
int sample_rr(int n, const SpeedSampler& speeds, const SpeedSampler& delays, Rng& rng);

/// Survivor-count sampler for a fixed parameter under uniform random
/// configurations.  The parameter is certified generic once, at
/// construction; sampling then never hits a collision tie.
class FfSampler {
public:
    explicit FfSampler(Parameter p);
    int operator()(Rng& rng) const;
    /// Full diagram of one uniform configuration.
    Diagram sample_diagram(Rng& rng) const;
    const Parameter& parameter() const { return p_; }

private:
    Parameter p_;
};

/// Monotone acceleration profile: position of a bullet with impetus I shot
/// at time T is f(I·(t−T)).
struct Acceleration {
    enum class Kind { Square, Sqrt, OneMinusExp, Custom };
    Kind kind = Kind::Square;
    /// Custom profile as a piecewise-linear graph; must start at (0,0) and
    /// be strictly increasing in both coordinates.
    std::vector<std::pair<double, double>> graph;

    double operator()(double x) const;
    void validate() const;
};

/// Accelerating-bullets problem: distinct positive impetuses, positive
/// delays, and a shared acceleration profile.
struct ImpetusProblem {
    std::vector<Rat> impetuses;
    std::vector<Rat> delays;
    Acceleration f;

    int n() const { return static_cast<int>(impetuses.size()); }
    void validate() const;
};

/// Survivor-count sampler for the accelerating problem, computed through
/// the order-preserving reduction to the linear problem with speeds equal
/// to the impetuses.  Construction certifies the linear problem generic.
class FafSampler {
public:
    explicit FafSampler(ImpetusProblem ip);
    int operator()(Rng& rng) const;
    Diagram sample_diagram(Rng& rng) const;
    /// Re-checks the reduction on `samples` fresh configurations: evaluates
    /// the acceleration profile at every realized collision height and
    /// verifies it preserves their strict order (and fixes zero).  Returns
    /// false on any violation.
    bool audit(int samples, Rng& rng) const;
    const ImpetusProblem& problem() const { return ip_; }

private:
    ImpetusProblem ip_;
    FfSampler linear_;
};

/// Sorted flock of live speeds; the slowest is the only one ever hit.
struct FlockState {
    /// Live speeds, sorted decreasing — the slowest sits at the back.
    std::vector<double> live;

    /// One shot: a new slowest joins the flock, anything faster takes the
    /// current slowest out with it.
    void shoot(double v) {
        if (live.empty() || v <= live.back())
            live.push_back(v);
        else
            live.pop_back();
    }
    int size() const { return static_cast<int>(live.size()); }
};

struct FlockRun {
    std::vector<int> sizes; ///< flock size after each shot
    int final_size = 0;
};

/// Runs the flock update over the whole speed sequence (speeds must be
/// pairwise distinct) and records the size trajectory.
FlockRun flock_run(const std::vector<double>& speeds);

/// Shot count needed to destroy a flock bullet of speed x ∈ [0,1) under
/// uniform(0,1) incoming speeds: slower arrivals shield it and must be
/// destroyed first.
long long flock_destruction_time(double x, Rng& rng);

/// Number of odd-length cycles of a permutation of {0..n−1}.
int odd_cycle_count(const std::vector<int>& perm);

/// Plays the removal game on a square matrix of pairwise-distinct entries:
/// repeatedly locate the global minimum at (i*, j*) and delete rows and
/// columns i* and j*; returns how many rounds had i* = j*.
int matrix_extremes_run(const std::vector<std::vector<double>>& entries);

/// Red-edge count on the unique path n → 0 when step m goes to m−1 (red)
/// if bernoullis[m−1] is nonzero and to m−2 (black) otherwise.  B_1 must
/// be 1 — node 1 has no two-step neighbor.
int two_step_distance(const std::vector<unsigned char>& bernoullis);

/// Draws the red-edge distance directly by walking the path from n,
/// realizing only the Bernoulli variables the walk touches.
int sample_two_step(long long n, Rng& rng);

/// Law of the red-edge distance, built by direct convolution of the
/// Bernoulli mixture over plain rationals.
SurvivorDistribution two_step_law(int n);

/// Outcome of comparing an empirical sample against an exact law.
struct Comparison {
    double tv = 0.0;         ///< total-variation distance
    double chi_square = 0.0; ///< statistic over pooled support cells
    int dof = 0;             ///< pooled cells minus one
    double p_value = 1.0;
};

/// Total-variation distance and a chi-square goodness-of-fit test of the
/// samples against the reference law.  Cells the reference gives zero mass
/// are excluded from the statistic; support cells are pooled until each
/// expected count reaches 5.  An observation outside the reference support
/// yields p = 0 with an infinite statistic.  Throws EmptySample.
Comparison compare_empirical(const std::vector<int>& samples, const SurvivorDistribution& reference);

} // namespace bullets
