#include "rlab/expr.hpp"

#include <array>
#include <cassert>
#include <cctype>
#include <vector>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

// Small primes for cosmetic square extraction from radicands. Correctness of
// merging/rationality never depends on extraction (the pairwise
// perfect-square test is exact); this just keeps radicands tidy, e.g.
// sqrt(8) -> 2*sqrt(2).
constexpr std::array<long, 11> kExtractPrimes = {2, 3, 5, 7, 11, 13,
                                                 17, 19, 23, 29, 31};

constexpr size_t kMaxSurdTerms = 16;

bool is_perfect_square(const mpz_class& n, mpz_class* root = nullptr) {
  if (n < 0) return false;
  if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return false;
  if (root) mpz_sqrt(root->get_mpz_t(), n.get_mpz_t());
  return true;
}

// Reduce a radicand by its detectable square part: rad -> (reduced, mult)
// with sqrt(rad) == mult * sqrt(reduced). rad == 0 maps to (0, 0).
std::pair<mpz_class, mpz_class> reduce_radicand(mpz_class rad) {
  assert(rad >= 0);
  if (rad == 0) return {0, 0};
  mpz_class mult = 1, root;
  if (is_perfect_square(rad, &root)) return {1, root};
  for (long p : kExtractPrimes) {
    const mpz_class p2 = mpz_class(p) * p;
    if (p2 > rad) break;
    while (mpz_divisible_p(rad.get_mpz_t(), p2.get_mpz_t())) {
      rad /= p2;
      mult *= p;
    }
  }
  if (is_perfect_square(rad, &root)) return {1, mult * root};
  return {rad, mult};
}

}  // namespace

// ---------------------------------------------------------------------------
// QuadForm

void QuadForm::add_term(mpz_class rad, mpq_class coeff) {
  if (coeff == 0) return;
  auto [red, mult] = reduce_radicand(std::move(rad));
  if (mult == 0) return;  // sqrt(0) term
  coeff *= mult;
  if (red == 1) {
    rational_ += coeff;
    return;
  }
  auto it = irr_.find(red);
  if (it != irr_.end()) {
    it->second += coeff;
    if (it->second == 0) irr_.erase(it);
    return;
  }
  // Same square class as an existing radicand r' iff red*r' is a perfect
  // square s^2, in which case sqrt(red) == (s/r') * sqrt(r').
  for (auto& [r, c] : irr_) {
    mpz_class s;
    if (is_perfect_square(red * r, &s)) {
      c += coeff * mpq_class(s, r);
      if (c == 0) irr_.erase(r);
      return;
    }
  }
  irr_.emplace(std::move(red), std::move(coeff));
}

QuadForm QuadForm::monomial(const mpq_class& coeff, const mpz_class& rad) {
  QuadForm f;
  f.add_term(rad, coeff);
  return f;
}

std::optional<std::pair<mpq_class, mpz_class>> QuadForm::as_single_surd()
    const {
  if (irr_.empty()) return std::make_pair(rational_, mpz_class(1));
  if (rational_ == 0 && irr_.size() == 1)
    return std::make_pair(irr_.begin()->second, irr_.begin()->first);
  return std::nullopt;
}

std::optional<QuadForm> QuadForm::add(const QuadForm& a, const QuadForm& b) {
  QuadForm r = a;
  r.rational_ += b.rational_;
  for (const auto& [rad, c] : b.irr_) r.add_term(rad, c);
  if (r.irr_.size() > kMaxSurdTerms) return std::nullopt;
  return r;
}

std::optional<QuadForm> QuadForm::sub(const QuadForm& a, const QuadForm& b) {
  return add(a, neg(b));
}

QuadForm QuadForm::neg(const QuadForm& a) {
  QuadForm r;
  r.rational_ = -a.rational_;
  for (const auto& [rad, c] : a.irr_) r.irr_.emplace(rad, -c);
  return r;
}

std::optional<QuadForm> QuadForm::mul(const QuadForm& a, const QuadForm& b) {
  QuadForm r;
  r.rational_ = a.rational_ * b.rational_;
  for (const auto& [rad, c] : b.irr_) r.add_term(rad, c * a.rational_);
  for (const auto& [ra, ca] : a.irr_) {
    r.add_term(ra, ca * b.rational_);
    for (const auto& [rb, cb] : b.irr_) {
      // sqrt(ra)*sqrt(rb) = g*sqrt((ra/g)*(rb/g)) with g = gcd.
      mpz_class g;
      mpz_gcd(g.get_mpz_t(), ra.get_mpz_t(), rb.get_mpz_t());
      r.add_term((ra / g) * (rb / g), ca * cb * g);
    }
  }
  if (r.irr_.size() > kMaxSurdTerms) return std::nullopt;
  return r;
}

std::optional<QuadForm> QuadForm::div(const QuadForm& a, const QuadForm& b) {
  if (b.is_zero()) return std::nullopt;
  if (b.irr_.empty()) {
    QuadForm inv = from_mpq(1 / b.rational_);
    return mul(a, inv);
  }
  if (b.rational_ == 0 && b.irr_.size() == 1) {
    // 1/(c*sqrt(r)) = (1/(c*r))*sqrt(r)
    const auto& [rad, c] = *b.irr_.begin();
    QuadForm inv = monomial(1 / (c * rad), rad);
    return mul(a, inv);
  }
  if (b.rational_ != 0 && b.irr_.size() == 1) {
    // Conjugate: 1/(p + c*sqrt(r)) = (p - c*sqrt(r)) / (p^2 - c^2 r).
    // The denominator cannot vanish: r is certified non-square, so
    // sqrt(r) is irrational and p^2 != c^2 r.
    const auto& [rad, c] = *b.irr_.begin();
    const mpq_class den = b.rational_ * b.rational_ - c * c * rad;
    assert(den != 0);
    QuadForm conj;
    conj.rational_ = b.rational_ / den;
    conj.irr_.emplace(rad, -c / den);
    return mul(a, conj);
  }
  return std::nullopt;
}

std::optional<QuadForm> QuadForm::sqrt(const QuadForm& a) {
  if (!a.irr_.empty()) return std::nullopt;
  if (a.rational_ < 0) return std::nullopt;
  if (a.rational_ == 0) return QuadForm();
  // sqrt(p/q) = sqrt(p*q)/q
  QuadForm r;
  r.add_term(a.rational_.get_num() * a.rational_.get_den(),
             mpq_class(1, a.rational_.get_den()));
  return r;
}

// ---------------------------------------------------------------------------
// ConstExpr

struct ConstExpr::Node {
  Kind kind;
  mpq_class lit;  // Kind::Lit
  std::shared_ptr<const Node> a, b;
  std::optional<QuadForm> form;
};

ConstExpr::ConstExpr(const mpq_class& v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Lit;
  n->lit = v;
  n->lit.canonicalize();
  n->form = QuadForm::from_mpq(n->lit);
  n_ = std::move(n);
}

namespace {

template <typename F>
std::optional<QuadForm> combine_forms(const std::optional<QuadForm>& a,
                                      const std::optional<QuadForm>& b,
                                      F&& op) {
  if (!a || !b) return std::nullopt;
  return op(*a, *b);
}

}  // namespace

ConstExpr ConstExpr::sqrt(const ConstExpr& a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sqrt;
  n->a = a.n_;
  if (a.n_->form) n->form = QuadForm::sqrt(*a.n_->form);
  return ConstExpr(std::move(n));
}

ConstExpr operator-(const ConstExpr& a) {
  auto n = std::make_shared<ConstExpr::Node>();
  n->kind = ConstExpr::Kind::Neg;
  n->a = a.n_;
  if (a.n_->form) n->form = QuadForm::neg(*a.n_->form);
  return ConstExpr(std::move(n));
}

#define RLAB_DEFINE_BINOP(OP, KIND, FORM_OP)                        \
  ConstExpr operator OP(const ConstExpr& a, const ConstExpr& b) {   \
    auto n = std::make_shared<ConstExpr::Node>();                   \
    n->kind = ConstExpr::Kind::KIND;                                \
    n->a = a.n_;                                                    \
    n->b = b.n_;                                                    \
    n->form = combine_forms(a.n_->form, b.n_->form, QuadForm::FORM_OP); \
    return ConstExpr(std::move(n));                                 \
  }

RLAB_DEFINE_BINOP(+, Add, add)
RLAB_DEFINE_BINOP(-, Sub, sub)
RLAB_DEFINE_BINOP(*, Mul, mul)
RLAB_DEFINE_BINOP(/, Div, div)
#undef RLAB_DEFINE_BINOP

ConstExpr::Kind ConstExpr::kind() const { return n_->kind; }

const mpq_class& ConstExpr::literal() const {
  assert(n_->kind == Kind::Lit);
  return n_->lit;
}

ConstExpr ConstExpr::child(int i) const {
  return ConstExpr(i == 0 ? n_->a : n_->b);
}

const std::optional<QuadForm>& ConstExpr::form() const { return n_->form; }

std::optional<mpq_class> ConstExpr::as_rational() const {
  if (!n_->form) return std::nullopt;
  return n_->form->as_rational();
}

bool ConstExpr::is_exact_zero() const {
  return n_->form && n_->form->is_zero();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(ConstExpr::Kind k) {
  switch (k) {
    case ConstExpr::Kind::Add:
    case ConstExpr::Kind::Sub:
      return 1;
    case ConstExpr::Kind::Mul:
    case ConstExpr::Kind::Div:
      return 2;
    case ConstExpr::Kind::Neg:
      return 3;
    default:
      return 4;
  }
}

void print_node(const ConstExpr& e, std::string& out, int parent_prec,
                bool right_side) {
  const int prec = precedence(e.kind());
  const bool parens =
      prec < parent_prec || (prec == parent_prec && right_side && prec <= 2);
  if (parens) out += '(';
  switch (e.kind()) {
    case ConstExpr::Kind::Lit: {
      const mpq_class& q = e.literal();
      if (q < 0 && parent_prec > 0 && !parens) {
        // A bare negative literal inside a larger expression prints as a
        // negated factor so the output stays inside the grammar.
        out += '-';
        out += mpq_class(-q).get_str();
      } else {
        out += q.get_str();
      }
      break;
    }
    case ConstExpr::Kind::Sqrt:
      out += "sqrt(";
      print_node(e.child(0), out, 0, false);
      out += ')';
      break;
    case ConstExpr::Kind::Neg:
      out += '-';
      print_node(e.child(0), out, precedence(ConstExpr::Kind::Neg), false);
      break;
    case ConstExpr::Kind::Add:
      print_node(e.child(0), out, 1, false);
      out += '+';
      print_node(e.child(1), out, 1, true);
      break;
    case ConstExpr::Kind::Sub:
      print_node(e.child(0), out, 1, false);
      out += '-';
      print_node(e.child(1), out, 1, true);
      break;
    case ConstExpr::Kind::Mul:
      print_node(e.child(0), out, 2, false);
      out += '*';
      print_node(e.child(1), out, 2, true);
      break;
    case ConstExpr::Kind::Div:
      print_node(e.child(0), out, 2, false);
      out += '/';
      print_node(e.child(1), out, 2, true);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string ConstExpr::str() const {
  std::string out;
  print_node(*this, out, 0, false);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  ConstExpr parse() {
    ConstExpr e = expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("trailing input at offset " + std::to_string(pos_) +
                       ": '" + std::string(text_.substr(pos_)) + "'");
    return e;
  }

 private:
  ConstExpr expr() {
    ConstExpr e = term();
    while (true) {
      skip_ws();
      if (eat('+')) {
        e = e + term();
      } else if (eat('-')) {
        e = e - term();
      } else {
        return e;
      }
    }
  }

  ConstExpr term() {
    ConstExpr e = factor();
    while (true) {
      skip_ws();
      if (eat('*')) {
        e = e * factor();
      } else if (eat('/')) {
        e = e / factor();
      } else {
        return e;
      }
    }
  }

  ConstExpr factor() {
    skip_ws();
    if (eat('-')) return -factor();
    if (eat('(')) {
      ConstExpr e = expr();
      expect(')');
      return e;
    }
    if (match_keyword("sqrt")) {
      expect('(');
      ConstExpr e = expr();
      expect(')');
      return ConstExpr::sqrt(e);
    }
    return integer_or_fraction();
  }

  ConstExpr integer_or_fraction() {
    const mpz_class num = integer();
    // INT '/' INT binds at the factor level; a following sqrt/paren means
    // the '/' belongs to term parsing instead.
    const size_t save = pos_;
    skip_ws();
    if (eat('/')) {
      skip_ws();
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        const mpz_class den = integer();
        if (den == 0) throw ParseError("zero denominator in literal");
        mpq_class q(num, den);
        q.canonicalize();
        return ConstExpr(q);
      }
      pos_ = save;
    } else {
      pos_ = save;
    }
    return ConstExpr(mpq_class(num));
  }

  mpz_class integer() {
    skip_ws();
    const size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start)
      throw ParseError("expected integer at offset " + std::to_string(start));
    return mpz_class(std::string(text_.substr(start, pos_ - start)), 10);
  }

  bool match_keyword(std::string_view kw) {
    skip_ws();
    if (text_.substr(pos_, kw.size()) == kw) {
      pos_ += kw.size();
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c))
      throw ParseError(std::string("expected '") + c + "' at offset " +
                       std::to_string(pos_));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace

ConstExpr parse_const_expr(std::string_view text) {
  return Parser(text).parse();
}

}  // namespace rlab
