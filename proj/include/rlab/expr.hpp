#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace rlab {

// Exact canonical value q0 + sum_i qi * sqrt(ri) with qi in Q, ri >= 2
// integers. Invariants:
//   * no zero qi,
//   * every ri is certified non-square (mpz_perfect_square_p),
//   * pairwise products ri*rj are certified non-squares, i.e. the sqrt(ri)
//     lie in distinct square classes.
// Under these invariants {1} u {sqrt(ri)} is linearly independent over Q
// (standard multiquadratic-extension fact), so is_zero()/is_rational() are
// exact decisions, not numeric ones. Operations that would leave this class
// (nested radicals, huge term counts) return nullopt and callers fall back
// to interval refinement.
class QuadForm {
 public:
  QuadForm() = default;
  static QuadForm from_mpq(const mpq_class& q) {
    QuadForm f;
    f.rational_ = q;
    return f;
  }
  // coeff * sqrt(rad), rad >= 0.
  static QuadForm monomial(const mpq_class& coeff, const mpz_class& rad);

  const mpq_class& rational_part() const { return rational_; }
  const std::map<mpz_class, mpq_class>& surd_terms() const { return irr_; }

  bool is_rational() const { return irr_.empty(); }
  bool is_zero() const { return irr_.empty() && rational_ == 0; }
  std::optional<mpq_class> as_rational() const {
    if (!is_rational()) return std::nullopt;
    return rational_;
  }
  // Exact single-surd view q*sqrt(r) (rational part must be 0); rational
  // values are reported with r = 1.
  std::optional<std::pair<mpq_class, mpz_class>> as_single_surd() const;

  static std::optional<QuadForm> add(const QuadForm& a, const QuadForm& b);
  static std::optional<QuadForm> sub(const QuadForm& a, const QuadForm& b);
  static std::optional<QuadForm> mul(const QuadForm& a, const QuadForm& b);
  // nullopt when divisor is exactly zero or inversion leaves the class.
  static std::optional<QuadForm> div(const QuadForm& a, const QuadForm& b);
  // nullopt when the argument is negative or not a nonnegative rational.
  static std::optional<QuadForm> sqrt(const QuadForm& a);
  static QuadForm neg(const QuadForm& a);

  bool operator==(const QuadForm& o) const {
    return rational_ == o.rational_ && irr_ == o.irr_;
  }

 private:
  void add_term(mpz_class rad, mpq_class coeff);
  mpq_class rational_ = 0;
  std::map<mpz_class, mpq_class> irr_;
};

// Immutable expression tree over the constant grammar
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := INT | INT '/' INT | 'sqrt(' expr ')' | '(' expr ')' | '-' factor
// Each node eagerly carries its QuadForm when the value stays inside the
// quadratic-surd class; evaluation and exact decisions live in exactreal.
class ConstExpr {
 public:
  enum class Kind { Lit, Sqrt, Neg, Add, Sub, Mul, Div };

  ConstExpr() : ConstExpr(mpq_class(0)) {}
  ConstExpr(long v) : ConstExpr(mpq_class(v)) {}  // NOLINT(implicit)
  explicit ConstExpr(const mpz_class& v) : ConstExpr(mpq_class(v)) {}
  explicit ConstExpr(const mpq_class& v);

  static ConstExpr sqrt(const ConstExpr& a);
  friend ConstExpr operator+(const ConstExpr& a, const ConstExpr& b);
  friend ConstExpr operator-(const ConstExpr& a, const ConstExpr& b);
  friend ConstExpr operator*(const ConstExpr& a, const ConstExpr& b);
  friend ConstExpr operator/(const ConstExpr& a, const ConstExpr& b);
  friend ConstExpr operator-(const ConstExpr& a);

  Kind kind() const;
  const mpq_class& literal() const;  // Kind::Lit only
  ConstExpr child(int i) const;      // 0 = left/only, 1 = right

  // Canonical form when the value is representable as q0 + sum qi*sqrt(ri).
  const std::optional<QuadForm>& form() const;
  std::optional<mpq_class> as_rational() const;
  bool is_exact_zero() const;

  // Grammar-conformant printing; parse_const_expr(str()) reproduces the
  // value (the reparsed tree may associate literals differently).
  std::string str() const;

 private:
  struct Node;
  explicit ConstExpr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

ConstExpr parse_const_expr(std::string_view text);

}  // namespace rlab
