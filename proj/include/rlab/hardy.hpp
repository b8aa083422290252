#pragma once

#include <gmpxx.h>

#include <vector>

#include "rlab/exactreal.hpp"
#include "rlab/expr.hpp"
#include "rlab/polynomial.hpp"

namespace rlab {

// One term coeff * t^exponent of a real combination. Exponents are
// rationals with denominator 1 or 2 (integer and half-integer powers); the
// constructor of HardyCombo rejects anything else.
struct HardyTerm {
  ConstExpr coeff;
  mpq_class exponent;
};

// f(t) = sum_i coeff_i * t^(e_i), distinct exponents, evaluated exactly at
// positive integers via sqrt of an integer power.
class HardyCombo {
 public:
  HardyCombo() = default;
  explicit HardyCombo(std::vector<HardyTerm> terms);

  const std::vector<HardyTerm>& terms() const { return terms_; }
  // Largest exponent with a coefficient that is not exactly zero.
  mpq_class top_exponent() const;

  // Exact value f(n) as a constant expression, n >= 1.
  ConstExpr operator()(const mpz_class& n) const;

 private:
  std::vector<HardyTerm> terms_;
};

enum class RoundMode { Floor, Nearest };

// Integer sequence u(n) = round(f(n)).
struct IterateSeq {
  HardyCombo f;
  RoundMode mode = RoundMode::Floor;
  std::string name;  // for reports

  mpz_class operator()(const mpz_class& n,
                       long cap_bits = kDefaultPrecCap) const;
};

// Enclosure of max_{n in [n_lo, n_hi]} |sum_i theta_i * u_i(n) - P(n)|
// together with the n attaining the certified lower bound.
struct DeviationReport {
  DyadicInterval max_abs;
  mpz_class argmax;
};

DeviationReport combo_deviation(const std::vector<IterateSeq>& us,
                                const std::vector<ConstExpr>& thetas,
                                const CPoly& P, const mpz_class& n_lo,
                                const mpz_class& n_hi, long precision_bits);

}  // namespace rlab
