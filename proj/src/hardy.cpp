#include "rlab/hardy.hpp"

#include <set>
#include <stdexcept>

#include "rlab/errors.hpp"

namespace rlab {

HardyCombo::HardyCombo(std::vector<HardyTerm> terms)
    : terms_(std::move(terms)) {
  std::set<mpq_class> seen;
  for (const auto& t : terms_) {
    if (t.exponent < 0)
      throw std::invalid_argument("HardyCombo: negative exponent " +
                                  t.exponent.get_str());
    if (t.exponent.get_den() != 1 && t.exponent.get_den() != 2)
      throw std::invalid_argument(
          "HardyCombo: only integer and half-integer exponents, got " +
          t.exponent.get_str());
    if (!seen.insert(t.exponent).second)
      throw std::invalid_argument("HardyCombo: duplicate exponent " +
                                  t.exponent.get_str());
  }
}

mpq_class HardyCombo::top_exponent() const {
  mpq_class top = 0;
  for (const auto& t : terms_)
    if (!t.coeff.is_exact_zero() && t.exponent > top) top = t.exponent;
  return top;
}

ConstExpr HardyCombo::operator()(const mpz_class& n) const {
  if (n < 1) throw std::invalid_argument("HardyCombo: n must be >= 1");
  ConstExpr acc(0);
  for (const auto& t : terms_) {
    // t^(j/2) with j = 2*e or the integer power directly.
    const mpz_class num = t.exponent.get_num();
    ConstExpr power(1);
    if (t.exponent.get_den() == 1) {
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), n.get_mpz_t(), num.get_ui());
      power = ConstExpr(p);
    } else {
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), n.get_mpz_t(), num.get_ui());
      power = ConstExpr::sqrt(ConstExpr(p));
    }
    acc = acc + t.coeff * power;
  }
  return acc;
}

mpz_class IterateSeq::operator()(const mpz_class& n, long cap_bits) const {
  const ConstExpr v = f(n);
  return mode == RoundMode::Floor ? floor_exact(v, cap_bits)
                                  : nearest_exact(v, cap_bits);
}

DeviationReport combo_deviation(const std::vector<IterateSeq>& us,
                                const std::vector<ConstExpr>& thetas,
                                const CPoly& P, const mpz_class& n_lo,
                                const mpz_class& n_hi, long precision_bits) {
  if (us.size() != thetas.size())
    throw std::invalid_argument("combo_deviation: size mismatch");
  if (n_lo < 1 || n_hi < n_lo)
    throw std::invalid_argument("combo_deviation: bad range");
  std::optional<Dyadic> best_lo, best_hi;
  mpz_class argmax = n_lo;
  for (mpz_class n = n_lo; n <= n_hi; ++n) {
    ConstExpr delta(0);
    for (size_t i = 0; i < us.size(); ++i)
      delta = delta + thetas[i] * ConstExpr(us[i](n));
    delta = delta - P(n);
    const DyadicInterval d = eval_interval(delta, precision_bits).abs();
    if (!best_lo || d.lo() > *best_lo) {
      best_lo = d.lo();
      argmax = n;
    }
    if (!best_hi || d.hi() > *best_hi) best_hi = d.hi();
  }
  return {DyadicInterval(*best_lo, *best_hi), argmax};
}

}  // namespace rlab
