#pragma once

/**
 * @file geometry.hpp
 * @brief Exact geometry of virtual trajectories.
 *
 * A bullet shot at time `birth` with speed `speed` sweeps the half-line
 * {(t, speed·(t − birth)) : t ≥ birth} in the time×position plane.  This
 * module answers, with exact rational arithmetic, the questions everything
 * else is built on: when do two half-lines meet, where, do three of them
 * pass through one point, and on which side of a line does a point lie.
 * No floating point is used in any predicate.
 */

#include <optional>

#include "bullets/errors.hpp"
#include "bullets/rational.hpp"

namespace bullets {

/// Virtual trajectory of one bullet (speed ≥ 0 is enforced upstream).
struct HalfLine {
    Rat speed;
    Rat birth;
};

struct SpaceTimePoint {
    Rat time;
    Rat position;

    friend bool operator==(const SpaceTimePoint& a, const SpaceTimePoint& b) {
        return a.time == b.time && a.position == b.position;
    }
};

/// A collision time: either a finite rational or +infinity (no collision).
/// Total order with infinity maximal.
class ExtTime {
  public:
    static ExtTime finite(Rat t) { return ExtTime(true, std::move(t)); }
    static ExtTime infinity() { return ExtTime(false, Rat(0)); }

    bool is_finite() const { return finite_; }
    const Rat& value() const {
        if (!finite_) throw Invalid("extended time: value() of infinity");
        return t_;
    }

    friend bool operator==(const ExtTime& a, const ExtTime& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.t_ == b.t_;
    }
    friend bool operator!=(const ExtTime& a, const ExtTime& b) { return !(a == b); }
    friend bool operator<(const ExtTime& a, const ExtTime& b) {
        if (!b.finite_) return a.finite_;
        return a.finite_ && a.t_ < b.t_;
    }
    friend bool operator<=(const ExtTime& a, const ExtTime& b) { return !(b < a); }
    friend bool operator>(const ExtTime& a, const ExtTime& b) { return b < a; }
    friend bool operator>=(const ExtTime& a, const ExtTime& b) { return !(a < b); }

  private:
    ExtTime(bool f, Rat t) : finite_(f), t_(std::move(t)) {}
    bool finite_;
    Rat t_;
};

/// Time at which the two half-lines meet: (v_a·t_a − v_b·t_b)/(v_a − v_b)
/// when that instant is ≥ both births, infinity otherwise.
/// Throws EqualSpeeds when a.speed = b.speed.
ExtTime virtual_collision_time(const HalfLine& a, const HalfLine& b);

/// The meeting point (time, position) when the collision time is finite.
std::optional<SpaceTimePoint> collision_point(const HalfLine& a, const HalfLine& b);

/// True iff the three half-lines share a common point.  Exact; requires
/// pairwise-distinct speeds (throws EqualSpeeds).
bool concurrent(const HalfLine& a, const HalfLine& b, const HalfLine& c);

/// Sign of p.position − l.speed·(p.time − l.birth): +1 strictly above the
/// full supporting line of l, −1 strictly below, 0 on it.
int side_of_line(const SpaceTimePoint& p, const HalfLine& l);

} // namespace bullets
