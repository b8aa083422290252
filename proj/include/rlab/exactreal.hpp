#pragma once

#include <optional>

#include "rlab/dyadic.hpp"
#include "rlab/expr.hpp"

namespace rlab {

// Default ladder cap for exact decisions (floor/nearest/compare). Shipped
// parameter sets decide far below this; hitting it raises
// PrecisionExhausted rather than guessing.
inline constexpr long kDefaultPrecCap = 4096;

// Certified enclosure of e with width <= 2^(1-precision_bits) * max(1, |e|).
// Refinement nests: the result for 2p is contained in the result for p
// (both are prefixes of one deterministic cumulative-intersection ladder).
// Throws DomainError / DivideByZero / PrecisionExhausted.
DyadicInterval eval_interval(const ConstExpr& e, long precision_bits);

// Distance to the nearest integer, as a certified enclosure inside
// [0, 1/2]. Same nesting guarantee as eval_interval.
struct TorusNorm {
  DyadicInterval enclosure;
};
TorusNorm torus_norm(const ConstExpr& e, long precision_bits);

enum class Cmp { Below, Above, Unknown };

// Certified strict comparison of the value of e against an exact rational
// threshold. Unknown only when the cap is reached (or the value equals the
// threshold exactly and no form decides it).
Cmp compare_value(const ConstExpr& e, const mpq_class& threshold,
                  long cap_bits);
// Same for ||e|| (torus norm) against the threshold.
Cmp compare_torus(const ConstExpr& e, const mpq_class& threshold,
                  long cap_bits);

// Exact sign of e: -1/0/+1, nullopt if undecided at the cap. Zero is only
// reported when the canonical form certifies it.
std::optional<int> sign_exact(const ConstExpr& e, long cap_bits);

// floor(e) as an exact integer. Terminates at low precision whenever the
// canonical form certifies e rational or irrational; otherwise refines to
// the cap and throws PrecisionExhausted if the floor stays ambiguous.
mpz_class floor_exact(const ConstExpr& e, long cap_bits = kDefaultPrecCap);

// Nearest integer with ties rounded up: floor(e + 1/2).
mpz_class nearest_exact(const ConstExpr& e, long cap_bits = kDefaultPrecCap);

// Certified comparison of ||scale * sqrt(rad)|| against a rational
// threshold, computed with integer square roots only (no expression tree);
// the hot path for long scans.
Cmp norm_surd_compare(const mpq_class& scale, const mpz_class& rad,
                      const mpq_class& threshold, long cap_bits);

}  // namespace rlab
