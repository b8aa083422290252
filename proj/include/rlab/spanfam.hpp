#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rlab/expr.hpp"
#include "rlab/polynomial.hpp"

namespace rlab::span {

// Exact coordinates of a constant in the family's declared basis
// (basis[0] is always 1; basis[1], when present, an irrational like
// sqrt(2)). Zero tests are coordinatewise and therefore exact.
struct SymCoeff {
  std::vector<mpq_class> v;

  bool is_zero() const {
    for (const auto& q : v)
      if (q != 0) return false;
    return true;
  }
  friend bool operator==(const SymCoeff&, const SymCoeff&) = default;
};

struct GenTerm {
  SymCoeff coeff;
  mpq_class exponent;
};

struct Generator {
  std::string name;
  std::vector<GenTerm> terms;  // distinct exponents
};

// Generators over a constant basis {1} or {1, b}. The basis qualifies when
// its members are certified pairwise Q-independent together with 1 via
// canonical forms (validate() enforces this for the sizes we support).
struct GenFamily {
  std::vector<std::string> basis_names;
  std::vector<ConstExpr> basis_values;
  std::vector<Generator> gens;

  void validate() const;  // throws UnsupportedShape
  ConstExpr coeff_value(const SymCoeff& c) const;
  size_t arity() const { return gens.size(); }
};

// Generalized power sum: exponent -> nonzero symbolic coefficient.
using GPS = std::map<mpq_class, SymCoeff>;

// F = sum_i sum_m c[i][m] * (d/dt)^m gens[i], exact term algebra.
// c[i] may have any length (missing derivative orders are zero).
GPS integer_combination(const GenFamily& fam,
                        const std::vector<std::vector<mpz_class>>& c);

enum class LimitClass { ZeroFunction, LimitZero, LimitInfinity, FiniteNonzero };

struct Classification {
  LimitClass cls;
  mpq_class top_exponent;                // 0 for ZeroFunction
  std::optional<SymCoeff> finite_value;  // set iff FiniteNonzero
};

// Limit behaviour of the GPS as t -> +infinity, decided exactly from the
// top surviving exponent.
Classification classify_limit(const GPS& g);

// Exact value of the GPS at integer t >= 1 (numeric cross-check hook).
ConstExpr gps_value(const GenFamily& fam, const GPS& g, const mpz_class& t);

// The group of rational polynomials P for which some nonzero integer
// combination x of the family satisfies  sum_i x_i g_i - P -> 0; presented
// by Z-generators. zero_excluded records that no nonzero combination
// shadows the zero polynomial (terms with negative exponents decay on
// their own and never obstruct).
struct PolyLattice {
  std::vector<QPoly> basis;
  bool integral;       // every generator has integer coefficients
  bool zero_excluded;
};
PolyLattice poly_shadow(const GenFamily& fam);

struct IntersectiveReport {
  bool all_pass;
  unsigned long checked_max;
  // witness[m-1] = smallest n in [1, m] with p(n) == 0 mod m for all p
  // (0 when none exists; polynomial values mod m are m-periodic, so the
  // scan over one period is a complete decision).
  std::vector<unsigned long> witness;
  unsigned long first_fail;  // 0 if all pass
};
IntersectiveReport joint_intersective_check(const std::vector<QPoly>& polys,
                                            unsigned long max_modulus);

// Saturated basis (as rows) of {x in Z^cols : A x = 0} for the integer
// matrix A given as rows; HNF-style unimodular row reduction of [A^T | I].
std::vector<std::vector<mpz_class>> integer_kernel(
    const std::vector<std::vector<mpz_class>>& a, size_t cols);

}  // namespace rlab::span
