#include "rlab/exactreal.hpp"

#include <cassert>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

// Internal control flow: a rung of the ladder could not produce an interval
// (divisor enclosure straddles zero) and needs more precision.
struct NeedsRefine {};

constexpr long kLadderStart = 64;
// Absolute ceiling for internal refinement inside eval_interval; decision
// routines pass their own (smaller) caps.
constexpr long kLadderCeiling = 1L << 21;

DyadicInterval raw_eval(const ConstExpr& e, long w) {
  switch (e.kind()) {
    case ConstExpr::Kind::Lit:
      return DyadicInterval::from_mpq(e.literal(), w);
    case ConstExpr::Kind::Neg:
      return -raw_eval(e.child(0), w);
    case ConstExpr::Kind::Sqrt: {
      const DyadicInterval a = raw_eval(e.child(0), w);
      if (a.hi().sign() < 0)
        throw DomainError("sqrt argument certified negative: " +
                          e.child(0).str());
      return DyadicInterval::sqrt_enclose(a, w);
    }
    case ConstExpr::Kind::Add:
      return (raw_eval(e.child(0), w) + raw_eval(e.child(1), w)).rounded(w);
    case ConstExpr::Kind::Sub:
      return (raw_eval(e.child(0), w) - raw_eval(e.child(1), w)).rounded(w);
    case ConstExpr::Kind::Mul:
      return (raw_eval(e.child(0), w) * raw_eval(e.child(1), w)).rounded(w);
    case ConstExpr::Kind::Div: {
      const ConstExpr den = e.child(1);
      if (den.is_exact_zero())
        throw DivideByZero("division by exact zero: " + den.str());
      const DyadicInterval a = raw_eval(e.child(0), w);
      const DyadicInterval b = raw_eval(den, w);
      if (b.contains_zero()) throw NeedsRefine{};
      return DyadicInterval::div(a, b, w);
    }
  }
  throw std::logic_error("raw_eval: bad kind");
}

// One deterministic refinement ladder per expression: rung w doubles from
// kLadderStart and each rung's raw interval is intersected with the running
// enclosure. All exact decisions below walk this same sequence, which is
// what makes higher-precision results subsets of lower-precision ones.
class Ladder {
 public:
  explicit Ladder(const ConstExpr& e) : e_(e) {}

  long rung() const { return w_; }
  const DyadicInterval& current() const { return *cur_; }
  // True while the latest rung produced no interval yet (divisor straddle).
  bool pending() const { return pending_ || !cur_; }

  void step() {
    const long next = cur_ || w_ > 0 ? w_ * 2 : kLadderStart;
    if (next > kLadderCeiling)
      throw PrecisionExhausted("refinement ceiling reached for " + e_.str());
    try {
      const DyadicInterval raw = raw_eval(e_, next);
      cur_ = cur_ ? cur_->intersect(raw) : raw;
      pending_ = false;
    } catch (const NeedsRefine&) {
      // Divisor straddles zero at this rung; keep the previous enclosure
      // (if any) and retry wider on the next step.
      pending_ = true;
    }
    w_ = next;
  }

 private:
  ConstExpr e_;
  std::optional<DyadicInterval> cur_;
  long w_ = 0;
  bool pending_ = true;
};

// Width contract: width <= 2^(1-p) * max(1, |value|). Uses the conservative
// stand-in max(1, minabs(I)) <= max(1, |value|).
bool width_ok(const DyadicInterval& I, long p) {
  const Dyadic w = I.width();
  if (w.is_zero()) return true;
  Dyadic bound(1, 1 - p);  // 2^(1-p)
  if (!I.contains_zero()) {
    const Dyadic minabs = std::min(I.lo().abs(), I.hi().abs());
    if (minabs > Dyadic(1)) bound = bound * minabs;
  }
  return w <= bound;
}

// Torus-norm enclosure from a value enclosure of width < 1/2: the nearest
// integer to any point of I is one of {c-1, c, c+1} for c = round(mid).
DyadicInterval torus_from_interval(const DyadicInterval& I) {
  const Dyadic half(1, -1);
  const mpz_class c = (I.mid() + half).floor();
  std::optional<Dyadic> lo, hi;
  for (int dk = -1; dk <= 1; ++dk) {
    const Dyadic k(mpz_class(c + dk), 0);
    const DyadicInterval d =
        (I - DyadicInterval::point(k)).abs();
    if (!lo || d.lo() < *lo) lo = d.lo();
    if (!hi || d.hi() < *hi) hi = d.hi();
  }
  Dyadic l = std::max(Dyadic(0), *lo);
  Dyadic h = std::min(half, *hi);
  if (l > h) l = h;  // numeric guard; cannot trigger for sound inputs
  return {l, h};
}

}  // namespace

DyadicInterval eval_interval(const ConstExpr& e, long precision_bits) {
  if (precision_bits < 1)
    throw std::invalid_argument("eval_interval: precision_bits < 1");
  Ladder lad(e);
  while (true) {
    lad.step();
    if (lad.pending()) continue;
    if (width_ok(lad.current(), precision_bits)) return lad.current();
  }
}

TorusNorm torus_norm(const ConstExpr& e, long precision_bits) {
  if (precision_bits < 1)
    throw std::invalid_argument("torus_norm: precision_bits < 1");
  const Dyadic quarter(1, -2);
  Ladder lad(e);
  std::optional<DyadicInterval> acc;
  while (true) {
    lad.step();
    if (lad.pending()) continue;
    const DyadicInterval& I = lad.current();
    if (I.width() >= quarter) {
      if (lad.rung() >= kLadderCeiling)
        return {acc ? *acc : DyadicInterval(Dyadic(0), Dyadic(1, -1))};
      continue;
    }
    DyadicInterval norm = torus_from_interval(I);
    // Cumulative intersection keeps refinement nested even though the
    // candidate integer c can change between rungs.
    acc = acc ? acc->intersect(norm) : norm;
    if (width_ok(*acc, precision_bits) || acc->is_point()) return {*acc};
  }
}

namespace {

// Shared ladder walk for threshold decisions. decide(I) returns a verdict
// or nullopt to request refinement; exhausting cap_bits yields Unknown.
template <typename DecideFn>
Cmp ladder_decide(const ConstExpr& e, long cap_bits, DecideFn&& decide) {
  Ladder lad(e);
  while (lad.rung() < cap_bits) {
    lad.step();
    if (lad.pending()) continue;
    if (auto v = decide(lad.current())) return *v;
  }
  return Cmp::Unknown;
}

}  // namespace

Cmp compare_value(const ConstExpr& e, const mpq_class& threshold,
                  long cap_bits) {
  if (const auto r = e.as_rational()) {
    if (*r < threshold) return Cmp::Below;
    if (*r > threshold) return Cmp::Above;
    return Cmp::Unknown;  // exactly equal: neither strict inequality holds
  }
  return ladder_decide(e, cap_bits,
                       [&](const DyadicInterval& I) -> std::optional<Cmp> {
                         if (Dyadic::cmp_mpq(I.hi(), threshold) < 0)
                           return Cmp::Below;
                         if (Dyadic::cmp_mpq(I.lo(), threshold) > 0)
                           return Cmp::Above;
                         return std::nullopt;
                       });
}

Cmp compare_torus(const ConstExpr& e, const mpq_class& threshold,
                  long cap_bits) {
  // Exact path for certified rationals: ||p/q|| = min(r, q-r)/q.
  if (const auto r = e.as_rational()) {
    mpz_class rem;
    mpz_fdiv_r(rem.get_mpz_t(), r->get_num().get_mpz_t(),
               r->get_den().get_mpz_t());
    mpq_class norm(std::min(rem, mpz_class(r->get_den() - rem)),
                   r->get_den());
    norm.canonicalize();
    if (norm < threshold) return Cmp::Below;
    if (norm > threshold) return Cmp::Above;
    return Cmp::Unknown;
  }
  const Dyadic quarter(1, -2);
  Ladder lad(e);
  while (lad.rung() < cap_bits) {
    lad.step();
    if (lad.pending()) continue;
    const DyadicInterval& I = lad.current();
    if (I.width() >= quarter) continue;
    const DyadicInterval norm = torus_from_interval(I);
    if (Dyadic::cmp_mpq(norm.hi(), threshold) < 0) return Cmp::Below;
    if (Dyadic::cmp_mpq(norm.lo(), threshold) > 0) return Cmp::Above;
  }
  return Cmp::Unknown;
}

std::optional<int> sign_exact(const ConstExpr& e, long cap_bits) {
  if (e.is_exact_zero()) return 0;
  if (const auto r = e.as_rational()) return sgn(*r);
  Ladder lad(e);
  while (lad.rung() < cap_bits) {
    lad.step();
    if (lad.pending()) continue;
    if (lad.current().strictly_positive()) return 1;
    if (lad.current().strictly_negative()) return -1;
  }
  return std::nullopt;
}

mpz_class floor_exact(const ConstExpr& e, long cap_bits) {
  if (const auto r = e.as_rational()) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), r->get_num().get_mpz_t(),
               r->get_den().get_mpz_t());
    return q;
  }
  Ladder lad(e);
  while (lad.rung() < cap_bits) {
    lad.step();
    if (lad.pending()) continue;
    const mpz_class flo = lad.current().lo().floor();
    const mpz_class fhi = lad.current().hi().floor();
    if (flo == fhi) return flo;
    // hi may sit exactly on the integer boundary while the true (irrational)
    // value is strictly below it; the canonical form rules the boundary out.
    if (fhi == flo + 1 && lad.current().hi().floor() == lad.current().hi().ceil() &&
        e.form() && !e.form()->is_rational())
      return flo;
  }
  throw PrecisionExhausted("floor undecided at cap for " + e.str());
}

mpz_class nearest_exact(const ConstExpr& e, long cap_bits) {
  return floor_exact(e + ConstExpr(mpq_class(1, 2)), cap_bits);
}

Cmp norm_surd_compare(const mpq_class& scale, const mpz_class& rad,
                      const mpq_class& threshold, long cap_bits) {
  if (rad < 0) throw DomainError("norm_surd_compare: negative radicand");
  // Exact rational case: scale * s for square rad.
  mpz_class root;
  if (mpz_perfect_square_p(rad.get_mpz_t())) {
    mpz_sqrt(root.get_mpz_t(), rad.get_mpz_t());
    const mpq_class v = scale * root;
    mpz_class rem;
    mpz_fdiv_r(rem.get_mpz_t(), v.get_num().get_mpz_t(),
               v.get_den().get_mpz_t());
    mpq_class norm(std::min(rem, mpz_class(v.get_den() - rem)), v.get_den());
    norm.canonicalize();
    if (norm < threshold) return Cmp::Below;
    if (norm > threshold) return Cmp::Above;
    return Cmp::Unknown;
  }
  for (long g = kLadderStart; g <= cap_bits; g *= 2) {
    // sqrt(rad) is contained in [s, s+1] / 2^g for s = isqrt(rad * 4^g).
    mpz_class scaled = rad;
    scaled <<= static_cast<unsigned long>(2 * g);
    const mpz_class s = isqrt(scaled);
    mpz_class pow2g = 1;
    pow2g <<= static_cast<unsigned long>(g);
    mpq_class vlo = scale * mpq_class(s, pow2g);
    mpq_class vhi = scale * mpq_class(s + 1, pow2g);
    vlo.canonicalize();
    vhi.canonicalize();
    if (scale < 0) std::swap(vlo, vhi);
    // Nearest integer candidates around the midpoint.
    mpq_class mid = (vlo + vhi) / 2 + mpq_class(1, 2);
    mpz_class c;
    mpz_fdiv_q(c.get_mpz_t(), mid.get_num().get_mpz_t(),
               mid.get_den().get_mpz_t());
    std::optional<mpq_class> nlo, nhi;
    for (int dk = -1; dk <= 1; ++dk) {
      const mpz_class k = c + dk;
      mpq_class dlo = vlo - k, dhi = vhi - k;
      if (dlo < 0 && dhi > 0) {
        dhi = std::max(mpq_class(-dlo), dhi);
        dlo = 0;
      } else if (dhi <= 0) {
        std::swap(dlo, dhi);
        dlo = -dlo;
        dhi = -dhi;
      }
      if (!nlo || dlo < *nlo) nlo = dlo;
      if (!nhi || dhi < *nhi) nhi = dhi;
    }
    if (vhi - vlo >= mpq_class(1, 2)) continue;  // candidates not yet valid
    mpq_class lo = std::max(mpq_class(0), *nlo);
    mpq_class hi = std::min(mpq_class(1, 2), *nhi);
    if (hi < threshold) return Cmp::Below;
    if (lo > threshold) return Cmp::Above;
  }
  return Cmp::Unknown;
}

}  // namespace rlab
