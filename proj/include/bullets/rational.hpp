#pragma once

/**
 * @file rational.hpp
 * @brief Exact rational scalar: the number type every geometric quantity
 *        (speed, shot time, collision time, height) lives in.
 *
 * Key design decisions:
 *   - Backed by GMP's mpq_class, so numerator/denominator are arbitrary
 *     precision and every operation is exact.
 *   - Canonical form is an invariant: denominator > 0 and
 *     gcd(|num|, den) = 1 after every operation (GMP maintains this for
 *     arithmetic; we canonicalize explicitly after raw construction).
 *   - Serializes as "p/q", or just "p" when the denominator is 1.
 *   - to_double() exists for reporting only; no predicate uses it.
 */

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>

#include "bullets/errors.hpp"

namespace bullets {

class Rat {
  public:
    Rat() : v_(0) {}
    Rat(long n) : v_(n) {}                       // NOLINT: implicit by design
    Rat(long n, long d) : v_(n, d) {
        if (d == 0) throw Invalid("rational: zero denominator");
        v_.canonicalize();
    }

    /// Parse "p/q" or "p" (optional sign, decimal digits). Rejects q = 0.
    static Rat parse(const std::string& text) {
        mpq_class q;
        if (text.empty() || q.set_str(text, 10) != 0)
            throw Invalid("rational: cannot parse \"" + text + "\"");
        if (q.get_den() == 0)
            throw Invalid("rational: zero denominator in \"" + text + "\"");
        q.canonicalize();
        Rat r;
        r.v_ = std::move(q);
        return r;
    }

    /// Exact value of a double (doubles are dyadic rationals). Rejects NaN/inf.
    static Rat from_double(double x) {
        if (x != x || x - x != 0.0) throw Invalid("rational: non-finite double");
        Rat r;
        r.v_ = mpq_class(x);
        return r;
    }

    std::string str() const {
        if (v_.get_den() == 1) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    double to_double() const { return v_.get_d(); }

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return sgn(v_) == 0; }

    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw Invalid("rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { a += b; return a; }
    friend Rat operator-(Rat a, const Rat& b) { a -= b; return a; }
    friend Rat operator*(Rat a, const Rat& b) { a *= b; return a; }
    friend Rat operator/(Rat a, const Rat& b) { a /= b; return a; }
    friend Rat operator-(const Rat& a) {
        Rat r;
        r.v_ = -a.v_;
        return r;
    }

    friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

    /// Underlying GMP value, for hot loops that want to avoid copies.
    const mpq_class& raw() const { return v_; }
    mpq_class& raw() { return v_; }

  private:
    mpq_class v_;
};

inline const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

} // namespace bullets
