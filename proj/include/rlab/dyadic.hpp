#pragma once

#include <gmpxx.h>

#include <string>

namespace rlab {

// floor(sqrt(n)) for n >= 0, Newton iteration with a bit-length seed.
// Kept independent of GMP's mpz_sqrt so the two can cross-check each other.
mpz_class isqrt(const mpz_class& n);

// Dyadic rational man * 2^exp. Canonical form: man odd, or man == 0 and
// exp == 0. Exact ring arithmetic; rounding only happens through the
// explicit round_down / round_up directed operations.
class Dyadic {
 public:
  Dyadic() : man_(0), exp_(0) {}
  Dyadic(long v) : man_(v), exp_(0) { normalize(); }  // NOLINT(implicit)
  Dyadic(mpz_class man, long exp) : man_(std::move(man)), exp_(exp) {
    normalize();
  }

  // Requires a power-of-two denominator (callers validate; throws
  // std::invalid_argument otherwise).
  static Dyadic from_mpq(const mpq_class& q);
  static bool mpq_is_dyadic(const mpq_class& q);

  const mpz_class& mantissa() const { return man_; }
  long exponent() const { return exp_; }
  bool is_zero() const { return man_ == 0; }
  int sign() const { return sgn(man_); }

  mpq_class to_mpq() const;
  double to_double() const;  // convenience only, not used in certified paths
  std::string str() const;   // exact, as a fraction

  // value < 2^mag_ub() and (if nonzero) value' >= 2^mag_lb() in absolute
  // value; used for cheap comparisons with far-apart exponents.
  long mag_ub() const;
  long mag_lb() const;

  mpz_class floor() const;
  mpz_class ceil() const;

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a);
  Dyadic mul2k(long k) const { return is_zero() ? *this : Dyadic(man_, exp_ + k); }
  Dyadic abs() const { return sign() < 0 ? -*this : *this; }

  // Directed rounding to at most `prec` mantissa bits (prec >= 1).
  Dyadic round_down(long prec) const;  // toward -inf
  Dyadic round_up(long prec) const;    // toward +inf

  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.man_ == b.man_ && a.exp_ == b.exp_;
  }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) { return !(a == b); }
  friend bool operator<(const Dyadic& a, const Dyadic& b) {
    return cmp(a, b) < 0;
  }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) {
    return cmp(a, b) <= 0;
  }
  friend bool operator>(const Dyadic& a, const Dyadic& b) {
    return cmp(a, b) > 0;
  }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) {
    return cmp(a, b) >= 0;
  }
  static int cmp(const Dyadic& a, const Dyadic& b);
  static int cmp_mpq(const Dyadic& a, const mpq_class& q);  // sign(a - q)

 private:
  void normalize();
  mpz_class man_;
  long exp_;
};

// Closed interval [lo, hi] with dyadic endpoints. Add/sub/mul/neg are exact;
// width control is the caller's job via rounded(). div and sqrt_enclose give
// certified outward enclosures at a requested precision.
class DyadicInterval {
 public:
  DyadicInterval() = default;  // [0, 0]
  DyadicInterval(Dyadic lo, Dyadic hi);
  static DyadicInterval point(const Dyadic& d) { return {d, d}; }
  static DyadicInterval from_mpq(const mpq_class& q, long prec);

  const Dyadic& lo() const { return lo_; }
  const Dyadic& hi() const { return hi_; }
  Dyadic width() const { return hi_ - lo_; }
  Dyadic mid() const { return (lo_ + hi_).mul2k(-1); }
  bool is_point() const { return lo_ == hi_; }
  bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }
  bool strictly_positive() const { return lo_.sign() > 0; }
  bool strictly_negative() const { return hi_.sign() < 0; }
  bool contains(const Dyadic& d) const { return lo_ <= d && d <= hi_; }
  bool contains_mpq(const mpq_class& q) const;
  bool subset_of(const DyadicInterval& o) const {
    return o.lo_ <= lo_ && hi_ <= o.hi_;
  }

  friend DyadicInterval operator+(const DyadicInterval& a,
                                  const DyadicInterval& b);
  friend DyadicInterval operator-(const DyadicInterval& a,
                                  const DyadicInterval& b);
  friend DyadicInterval operator*(const DyadicInterval& a,
                                  const DyadicInterval& b);
  friend DyadicInterval operator-(const DyadicInterval& a);
  DyadicInterval abs() const;

  // Outward rounding of both endpoints to <= prec mantissa bits.
  DyadicInterval rounded(long prec) const;

  // Enclosure of a/b. Requires !b.contains_zero().
  static DyadicInterval div(const DyadicInterval& a, const DyadicInterval& b,
                            long prec);
  // Enclosure of sqrt(a) for a not entirely negative; a negative lo is
  // clamped to 0 (valid whenever the true value is nonnegative).
  static DyadicInterval sqrt_enclose(const DyadicInterval& a, long prec);

  // Requires overlap (always true for two enclosures of one value).
  DyadicInterval intersect(const DyadicInterval& o) const;

  std::string str() const;

 private:
  Dyadic lo_, hi_;
};

// Directed dyadic division helpers used by DyadicInterval::div.
Dyadic dyadic_div_down(const Dyadic& u, const Dyadic& v, long prec);
Dyadic dyadic_div_up(const Dyadic& u, const Dyadic& v, long prec);

}  // namespace rlab
