#pragma once

#include <gmpxx.h>

#include <vector>

#include "rlab/expr.hpp"

namespace rlab {

// Polynomial with exact rational coefficients, c[i] multiplying t^i.
// Trailing zero coefficients are trimmed on construction.
struct QPoly {
  std::vector<mpq_class> c;

  QPoly() = default;
  explicit QPoly(std::vector<mpq_class> coeffs) : c(std::move(coeffs)) {
    while (!c.empty() && c.back() == 0) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 if zero
  const mpq_class& leading() const { return c.back(); }

  mpq_class operator()(const mpz_class& t) const {
    mpq_class acc = 0;
    for (size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
    return acc;
  }
};

// Polynomial with ConstExpr coefficients (used where coefficients carry
// surds, e.g. L*t + L*xi).
struct CPoly {
  std::vector<ConstExpr> c;

  CPoly() = default;
  explicit CPoly(std::vector<ConstExpr> coeffs) : c(std::move(coeffs)) {
    while (!c.empty() && c.back().is_exact_zero()) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }

  ConstExpr operator()(const mpz_class& t) const {
    ConstExpr acc(0);
    const ConstExpr tv{t};
    for (size_t i = c.size(); i-- > 0;) acc = acc * tv + c[i];
    return acc;
  }
};

}  // namespace rlab
