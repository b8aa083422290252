#include "rlab/dyadic.hpp"

#include <cassert>
#include <stdexcept>

#include "rlab/errors.hpp"

namespace rlab {

mpz_class isqrt(const mpz_class& n) {
  if (n < 0) throw DomainError("isqrt: negative argument");
  if (n == 0) return 0;
  const size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
  // Seed x >= sqrt(n): 2^ceil(bits/2).
  mpz_class x = 1;
  x <<= (bits + 1) / 2;
  // Newton: monotone decreasing once above the root.
  while (true) {
    mpz_class y = (x + n / x) >> 1;
    if (y >= x) break;
    x = y;
  }
  // Belt and suspenders: clamp into the exact floor.
  while (x * x > n) --x;
  while ((x + 1) * (x + 1) <= n) ++x;
  return x;
}

// ---------------------------------------------------------------------------
// Dyadic

void Dyadic::normalize() {
  if (man_ == 0) {
    exp_ = 0;
    return;
  }
  const auto tz = mpz_scan1(man_.get_mpz_t(), 0);
  if (tz > 0) {
    man_ >>= tz;
    exp_ += static_cast<long>(tz);
  }
}

bool Dyadic::mpq_is_dyadic(const mpq_class& q) {
  const mpz_class& den = q.get_den();
  return mpz_popcount(den.get_mpz_t()) == 1;  // power of two (den >= 1)
}

Dyadic Dyadic::from_mpq(const mpq_class& q) {
  if (!mpq_is_dyadic(q))
    throw std::invalid_argument("from_mpq: denominator not a power of two: " +
                                q.get_str());
  const long k =
      static_cast<long>(mpz_sizeinbase(q.get_den().get_mpz_t(), 2)) - 1;
  return Dyadic(q.get_num(), -k);
}

mpq_class Dyadic::to_mpq() const {
  mpq_class r(man_);
  if (exp_ >= 0) {
    mpz_class num = man_ << exp_;
    r = mpq_class(num);
  } else {
    mpz_class den = 1;
    den <<= -exp_;
    r = mpq_class(man_, den);
    r.canonicalize();
  }
  return r;
}

double Dyadic::to_double() const {
  return mpq_get_d(to_mpq().get_mpq_t());
}

std::string Dyadic::str() const {
  const mpq_class q = to_mpq();
  return q.get_str();
}

long Dyadic::mag_ub() const {
  assert(man_ != 0);
  return static_cast<long>(mpz_sizeinbase(man_.get_mpz_t(), 2)) + exp_;
}

long Dyadic::mag_lb() const {
  assert(man_ != 0);
  return static_cast<long>(mpz_sizeinbase(man_.get_mpz_t(), 2)) - 1 + exp_;
}

mpz_class Dyadic::floor() const {
  if (man_ == 0) return 0;
  mpz_class r;
  if (exp_ >= 0) {
    r = man_ << exp_;
  } else {
    mpz_fdiv_q_2exp(r.get_mpz_t(), man_.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(-exp_));
  }
  return r;
}

mpz_class Dyadic::ceil() const {
  if (man_ == 0) return 0;
  mpz_class r;
  if (exp_ >= 0) {
    r = man_ << exp_;
  } else {
    mpz_cdiv_q_2exp(r.get_mpz_t(), man_.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(-exp_));
  }
  return r;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.man_ == 0) return b;
  if (b.man_ == 0) return a;
  const long e = std::min(a.exp_, b.exp_);
  mpz_class s = (a.man_ << static_cast<unsigned long>(a.exp_ - e)) +
                (b.man_ << static_cast<unsigned long>(b.exp_ - e));
  return Dyadic(std::move(s), e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  if (a.man_ == 0 || b.man_ == 0) return Dyadic();
  return Dyadic(a.man_ * b.man_, a.exp_ + b.exp_);
}

Dyadic operator-(const Dyadic& a) {
  Dyadic r;
  r.man_ = -a.man_;
  r.exp_ = a.man_ == 0 ? 0 : a.exp_;
  return r;
}

int Dyadic::cmp(const Dyadic& a, const Dyadic& b) {
  const int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa < sb ? -1 : 1;
  if (sa == 0) return 0;
  // Same nonzero sign: magnitude ranges decide without aligning mantissas
  // when the exponents are far apart (|a| < 2^mag_ub <= 2^mag_lb <= |b|).
  if (a.mag_ub() <= b.mag_lb()) return -sa;
  if (b.mag_ub() <= a.mag_lb()) return sa;
  const long e = std::min(a.exp_, b.exp_);
  mpz_class am = a.man_ << static_cast<unsigned long>(a.exp_ - e);
  mpz_class bm = b.man_ << static_cast<unsigned long>(b.exp_ - e);
  return ::cmp(am, bm) < 0 ? -1 : (am == bm ? 0 : 1);
}

int Dyadic::cmp_mpq(const Dyadic& a, const mpq_class& q) {
  // sign(man*2^e - num/den) = sign(man*2^e*den - num)
  mpz_class lhs = a.man_ * q.get_den();
  mpz_class rhs = q.get_num();
  if (a.exp_ >= 0) {
    lhs <<= static_cast<unsigned long>(a.exp_);
  } else {
    rhs <<= static_cast<unsigned long>(-a.exp_);
  }
  const int c = ::cmp(lhs, rhs);
  return c < 0 ? -1 : (c == 0 ? 0 : 1);
}

Dyadic Dyadic::round_down(long prec) const {
  assert(prec >= 1);
  if (man_ == 0) return *this;
  const long bits = static_cast<long>(mpz_sizeinbase(man_.get_mpz_t(), 2));
  if (bits <= prec) return *this;
  const long s = bits - prec;
  mpz_class q;
  mpz_fdiv_q_2exp(q.get_mpz_t(), man_.get_mpz_t(),
                  static_cast<mp_bitcnt_t>(s));
  return Dyadic(std::move(q), exp_ + s);
}

Dyadic Dyadic::round_up(long prec) const {
  assert(prec >= 1);
  if (man_ == 0) return *this;
  const long bits = static_cast<long>(mpz_sizeinbase(man_.get_mpz_t(), 2));
  if (bits <= prec) return *this;
  const long s = bits - prec;
  mpz_class q;
  mpz_cdiv_q_2exp(q.get_mpz_t(), man_.get_mpz_t(),
                  static_cast<mp_bitcnt_t>(s));
  return Dyadic(std::move(q), exp_ + s);
}

// ---------------------------------------------------------------------------
// DyadicInterval

DyadicInterval::DyadicInterval(Dyadic lo, Dyadic hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_ > hi_)
    throw std::invalid_argument("DyadicInterval: lo > hi (" + lo_.str() +
                                ", " + hi_.str() + ")");
}

DyadicInterval DyadicInterval::from_mpq(const mpq_class& q, long prec) {
  if (Dyadic::mpq_is_dyadic(q)) {
    // Exact point (no width), regardless of prec.
    return point(Dyadic::from_mpq(q));
  }
  // Directed rounding of num/den at prec bits.
  const Dyadic num(q.get_num(), 0), den(q.get_den(), 0);
  return {dyadic_div_down(num, den, prec), dyadic_div_up(num, den, prec)};
}

bool DyadicInterval::contains_mpq(const mpq_class& q) const {
  return Dyadic::cmp_mpq(lo_, q) <= 0 && Dyadic::cmp_mpq(hi_, q) >= 0;
}

DyadicInterval operator+(const DyadicInterval& a, const DyadicInterval& b) {
  return {a.lo_ + b.lo_, a.hi_ + b.hi_};
}

DyadicInterval operator-(const DyadicInterval& a, const DyadicInterval& b) {
  return {a.lo_ - b.hi_, a.hi_ - b.lo_};
}

DyadicInterval operator*(const DyadicInterval& a, const DyadicInterval& b) {
  const Dyadic p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_,
               p4 = a.hi_ * b.hi_;
  Dyadic lo = p1, hi = p1;
  for (const Dyadic* p : {&p2, &p3, &p4}) {
    if (*p < lo) lo = *p;
    if (*p > hi) hi = *p;
  }
  return {lo, hi};
}

DyadicInterval operator-(const DyadicInterval& a) { return {-a.hi_, -a.lo_}; }

DyadicInterval DyadicInterval::abs() const {
  if (lo_.sign() >= 0) return *this;
  if (hi_.sign() <= 0) return -*this;
  return {Dyadic(), std::max(-lo_, hi_)};
}

DyadicInterval DyadicInterval::rounded(long prec) const {
  return {lo_.round_down(prec), hi_.round_up(prec)};
}

Dyadic dyadic_div_down(const Dyadic& u, const Dyadic& v, long prec) {
  assert(!v.is_zero());
  if (u.is_zero()) return Dyadic();
  const long ub = static_cast<long>(mpz_sizeinbase(u.mantissa().get_mpz_t(), 2));
  const long vb = static_cast<long>(mpz_sizeinbase(v.mantissa().get_mpz_t(), 2));
  const long s = std::max(0L, prec + 2 + vb - ub);
  mpz_class num = u.mantissa() << static_cast<unsigned long>(s);
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), v.mantissa().get_mpz_t());
  return Dyadic(std::move(q), u.exponent() - v.exponent() - s);
}

Dyadic dyadic_div_up(const Dyadic& u, const Dyadic& v, long prec) {
  assert(!v.is_zero());
  if (u.is_zero()) return Dyadic();
  const long ub = static_cast<long>(mpz_sizeinbase(u.mantissa().get_mpz_t(), 2));
  const long vb = static_cast<long>(mpz_sizeinbase(v.mantissa().get_mpz_t(), 2));
  const long s = std::max(0L, prec + 2 + vb - ub);
  mpz_class num = u.mantissa() << static_cast<unsigned long>(s);
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), v.mantissa().get_mpz_t());
  return Dyadic(std::move(q), u.exponent() - v.exponent() - s);
}

DyadicInterval DyadicInterval::div(const DyadicInterval& a,
                                   const DyadicInterval& b, long prec) {
  if (b.contains_zero())
    throw std::invalid_argument("interval div: divisor contains zero");
  Dyadic lo, hi;
  bool first = true;
  for (const Dyadic* u : {&a.lo_, &a.hi_}) {
    for (const Dyadic* v : {&b.lo_, &b.hi_}) {
      const Dyadic dn = dyadic_div_down(*u, *v, prec);
      const Dyadic up = dyadic_div_up(*u, *v, prec);
      if (first) {
        lo = dn;
        hi = up;
        first = false;
      } else {
        if (dn < lo) lo = dn;
        if (up > hi) hi = up;
      }
    }
  }
  return {lo, hi};
}

DyadicInterval DyadicInterval::sqrt_enclose(const DyadicInterval& a,
                                            long prec) {
  if (a.hi_.sign() < 0)
    throw DomainError("sqrt of an entirely negative interval " + a.str());
  // sqrt of one endpoint value m*2^e >= 0, rounded in the given direction.
  const auto sqrt_dir = [prec](const Dyadic& d, bool up) {
    if (d.sign() <= 0) return Dyadic();  // lo < 0 clamps to 0
    // Scale mantissa so the integer sqrt carries >= prec+2 bits and the
    // exponent is even.
    const long bits =
        static_cast<long>(mpz_sizeinbase(d.mantissa().get_mpz_t(), 2));
    long k = std::max(0L, 2 * (prec + 2) - bits);
    if ((d.exponent() - k) % 2 != 0) ++k;
    mpz_class m = d.mantissa() << static_cast<unsigned long>(k);
    mpz_class s = isqrt(m);
    if (up && s * s != m) ++s;
    return Dyadic(std::move(s), (d.exponent() - k) / 2);
  };
  return {sqrt_dir(a.lo_, false), sqrt_dir(a.hi_, true)};
}

DyadicInterval DyadicInterval::intersect(const DyadicInterval& o) const {
  const Dyadic& l = lo_ > o.lo_ ? lo_ : o.lo_;
  const Dyadic& h = hi_ < o.hi_ ? hi_ : o.hi_;
  if (l > h)
    throw std::invalid_argument("intersect: disjoint intervals " + str() +
                                " and " + o.str());
  return {l, h};
}

std::string DyadicInterval::str() const {
  return "[" + lo_.str() + ", " + hi_.str() + "]";
}

}  // namespace rlab
