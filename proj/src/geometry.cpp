#include "bullets/geometry.hpp"

namespace bullets {

ExtTime virtual_collision_time(const HalfLine& a, const HalfLine& b) {
    if (a.speed == b.speed)
        throw EqualSpeeds("virtual meeting time undefined for equal speeds " + a.speed.str());
    Rat t = (a.speed * a.birth - b.speed * b.birth) / (a.speed - b.speed);
    if (t >= max(a.birth, b.birth)) return ExtTime::finite(std::move(t));
    return ExtTime::infinity();
}

std::optional<SpaceTimePoint> collision_point(const HalfLine& a, const HalfLine& b) {
    ExtTime t = virtual_collision_time(a, b);
    if (!t.is_finite()) return std::nullopt;
    Rat pos = a.speed * (t.value() - a.birth);
    return SpaceTimePoint{t.value(), std::move(pos)};
}

bool concurrent(const HalfLine& a, const HalfLine& b, const HalfLine& c) {
    if (a.speed == c.speed || b.speed == c.speed)
        throw EqualSpeeds("concurrent requires pairwise-distinct speeds");
    std::optional<SpaceTimePoint> m = collision_point(a, b); // throws on a.speed = b.speed
    if (!m) return false;
    // The common point must lie on c's half-line: on its supporting line and
    // not before c's birth.
    return side_of_line(*m, c) == 0 && m->time >= c.birth;
}

int side_of_line(const SpaceTimePoint& p, const HalfLine& l) {
    Rat d = p.position - l.speed * (p.time - l.birth);
    return d.sign();
}

} // namespace bullets
