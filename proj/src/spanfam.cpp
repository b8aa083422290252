#include "rlab/spanfam.hpp"

#include <algorithm>
#include <cassert>

#include "rlab/errors.hpp"

namespace rlab::span {

void GenFamily::validate() const {
  if (basis_names.empty() || basis_names[0] != "1" ||
      basis_values.size() != basis_names.size() ||
      basis_values[0].as_rational() != mpq_class(1))
    throw UnsupportedShape("family basis must start with the constant 1");
  if (basis_names.size() > 2)
    throw UnsupportedShape("only bases {1} and {1, b} are supported");
  if (basis_names.size() == 2) {
    const auto& f = basis_values[1].form();
    if (!f || f->is_rational())
      throw UnsupportedShape(
          "second basis element must be certified irrational; got " +
          basis_values[1].str());
  }
  for (const auto& g : gens) {
    std::vector<mpq_class> seen;
    for (const auto& t : g.terms) {
      if (t.coeff.v.size() != basis_names.size())
        throw UnsupportedShape("coefficient arity mismatch in generator " +
                               g.name);
      if (std::find(seen.begin(), seen.end(), t.exponent) != seen.end())
        throw UnsupportedShape("duplicate exponent in generator " + g.name);
      seen.push_back(t.exponent);
    }
  }
}

ConstExpr GenFamily::coeff_value(const SymCoeff& c) const {
  ConstExpr acc(0);
  for (size_t b = 0; b < c.v.size(); ++b)
    acc = acc + ConstExpr(c.v[b]) * basis_values[b];
  return acc;
}

namespace {

void gps_add(GPS& g, const mpq_class& exponent, const SymCoeff& c,
             const mpq_class& scale) {
  if (scale == 0 || c.is_zero()) return;
  auto it = g.find(exponent);
  if (it == g.end()) {
    SymCoeff scaled = c;
    for (auto& q : scaled.v) q *= scale;
    if (!scaled.is_zero()) g.emplace(exponent, std::move(scaled));
    return;
  }
  for (size_t b = 0; b < c.v.size(); ++b) it->second.v[b] += scale * c.v[b];
  if (it->second.is_zero()) g.erase(it);
}

// Falling factorial prod_{j<m} (gamma - j): the coefficient picked up by
// the m-th derivative of t^gamma.
mpq_class derivative_factor(const mpq_class& gamma, unsigned m) {
  mpq_class f = 1;
  for (unsigned j = 0; j < m; ++j) f *= gamma - j;
  return f;
}

}  // namespace

GPS integer_combination(const GenFamily& fam,
                        const std::vector<std::vector<mpz_class>>& c) {
  fam.validate();
  if (c.size() != fam.gens.size())
    throw UnsupportedShape("combination arity mismatch");
  GPS g;
  for (size_t i = 0; i < c.size(); ++i) {
    for (size_t m = 0; m < c[i].size(); ++m) {
      if (c[i][m] == 0) continue;
      const mpq_class scale(c[i][m]);
      for (const auto& term : fam.gens[i].terms) {
        const mpq_class f = derivative_factor(term.exponent, m);
        if (f == 0) continue;
        gps_add(g, term.exponent - m, term.coeff, scale * f);
      }
    }
  }
  return g;
}

Classification classify_limit(const GPS& g) {
  if (g.empty()) return {LimitClass::ZeroFunction, 0, std::nullopt};
  const auto& [top, coeff] = *g.rbegin();
  if (top > 0) return {LimitClass::LimitInfinity, top, std::nullopt};
  if (top < 0) return {LimitClass::LimitZero, top, std::nullopt};
  return {LimitClass::FiniteNonzero, 0, coeff};
}

ConstExpr gps_value(const GenFamily& fam, const GPS& g, const mpz_class& t) {
  if (t < 1) throw std::invalid_argument("gps_value: t must be >= 1");
  ConstExpr acc(0);
  for (const auto& [exponent, coeff] : g) {
    // t^e = t^floor(e) * sqrt(t)^(2*frac) with e in (1/2)Z after validate();
    // support any rational e with even/odd half decomposition.
    const mpq_class two_e = exponent * 2;
    if (two_e.get_den() != 1)
      throw UnsupportedShape("gps_value: exponent not a half-integer: " +
                             exponent.get_str());
    const mpz_class j = two_e.get_num();  // value = t^(j/2)
    const mpz_class aj = ::abs(j);
    ConstExpr power;
    if (aj % 2 == 0) {
      mpz_class half;
      mpz_pow_ui(half.get_mpz_t(), t.get_mpz_t(),
                 mpz_get_ui(mpz_class(aj / 2).get_mpz_t()));
      power = ConstExpr(half);
    } else {
      mpz_class p;
      mpz_pow_ui(p.get_mpz_t(), t.get_mpz_t(), mpz_get_ui(aj.get_mpz_t()));
      power = ConstExpr::sqrt(ConstExpr(p));
    }
    if (j < 0) power = ConstExpr(1) / power;
    acc = acc + fam.coeff_value(coeff) * power;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Integer kernels and the polynomial shadow

std::vector<std::vector<mpz_class>> integer_kernel(
    const std::vector<std::vector<mpz_class>>& a, size_t cols) {
  const size_t m = a.size();
  for (const auto& row : a) assert(row.size() == cols);
  // Working rows: [A^T | I], one row per unknown.
  std::vector<std::vector<mpz_class>> w(cols,
                                        std::vector<mpz_class>(m + cols, 0));
  for (size_t i = 0; i < cols; ++i) {
    for (size_t j = 0; j < m; ++j) w[i][j] = a[j][i];
    w[i][m + i] = 1;
  }
  size_t r = 0;  // rows above r are finished pivots
  for (size_t col = 0; col < m && r < cols; ++col) {
    // Euclidean elimination in this column among rows >= r.
    while (true) {
      size_t piv = cols;
      for (size_t i = r; i < cols; ++i) {
        if (w[i][col] == 0) continue;
        if (piv == cols || ::abs(w[i][col]) < ::abs(w[piv][col])) piv = i;
      }
      if (piv == cols) break;  // column already clear
      std::swap(w[piv], w[r]);
      bool reduced_all = true;
      for (size_t i = r + 1; i < cols; ++i) {
        if (w[i][col] == 0) continue;
        // |w[i][col]| >= |w[r][col]| by pivot choice, so the truncated
        // quotient is nonzero and the remainder strictly shrinks (Euclid).
        mpz_class q;
        mpz_tdiv_q(q.get_mpz_t(), w[i][col].get_mpz_t(),
                   w[r][col].get_mpz_t());
        if (q != 0)
          for (size_t k = col; k < m + cols; ++k) w[i][k] -= q * w[r][k];
        if (w[i][col] != 0) reduced_all = false;
      }
      if (reduced_all) {
        ++r;
        break;
      }
    }
  }
  std::vector<std::vector<mpz_class>> kernel;
  for (size_t i = r; i < cols; ++i) {
    for (size_t j = 0; j < m; ++j) assert(w[i][j] == 0);
    kernel.emplace_back(w[i].begin() + m, w[i].end());
  }
  return kernel;
}

namespace {

// Split the equation sum_i x_i * coeff_i == 0 (coeff in basis coordinates)
// into one integer row per basis slot, denominators cleared per row.
void append_split_rows(std::vector<std::vector<mpz_class>>& rows,
                       const std::vector<SymCoeff>& coeffs, size_t nbasis) {
  const size_t k = coeffs.size();
  for (size_t b = 0; b < nbasis; ++b) {
    mpz_class lcm = 1;
    for (const auto& c : coeffs)
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(),
              c.v[b].get_den().get_mpz_t());
    std::vector<mpz_class> row(k);
    bool nonzero = false;
    for (size_t i = 0; i < k; ++i) {
      mpq_class scaled = coeffs[i].v[b] * lcm;
      assert(scaled.get_den() == 1);
      row[i] = scaled.get_num();
      nonzero = nonzero || row[i] != 0;
    }
    if (nonzero) rows.push_back(std::move(row));
  }
}

}  // namespace

PolyLattice poly_shadow(const GenFamily& fam) {
  fam.validate();
  const size_t k = fam.gens.size();
  const size_t nb = fam.basis_names.size();

  // Partition exponents. Nonnegative integers form the polynomial part;
  // positive non-integers must vanish for a combination to shadow a
  // polynomial; negative exponents tend to 0 on their own and constrain
  // nothing.
  std::vector<mpq_class> hardy_exps;
  long max_deg = 0;
  for (const auto& g : fam.gens)
    for (const auto& t : g.terms) {
      if (t.exponent < 0) continue;
      if (t.exponent.get_den() == 1) {
        max_deg = std::max(max_deg,
                           static_cast<long>(t.exponent.get_num().get_si()));
      } else if (std::find(hardy_exps.begin(), hardy_exps.end(),
                           t.exponent) == hardy_exps.end()) {
        hardy_exps.push_back(t.exponent);
      }
    }

  const auto coeff_at = [&](size_t i, const mpq_class& e) {
    for (const auto& t : fam.gens[i].terms)
      if (t.exponent == e) return t.coeff;
    return SymCoeff{std::vector<mpq_class>(nb, 0)};
  };

  // Stage 1: integer tuples whose non-polynomial part vanishes.
  std::vector<std::vector<mpz_class>> rows;
  for (const auto& e : hardy_exps) {
    std::vector<SymCoeff> col;
    for (size_t i = 0; i < k; ++i) col.push_back(coeff_at(i, e));
    append_split_rows(rows, col, nb);
  }
  const auto tuples = integer_kernel(rows, k);

  // Stage 2: polynomial parts of those tuples; keep the subgroup with
  // rational coefficients (basis slots beyond "1" must cancel).
  const size_t dsz = static_cast<size_t>(max_deg) + 1;
  // poly_coeff[j][d] in basis coordinates for kernel generator j.
  std::vector<std::vector<SymCoeff>> pc(
      tuples.size(),
      std::vector<SymCoeff>(dsz, SymCoeff{std::vector<mpq_class>(nb, 0)}));
  for (size_t j = 0; j < tuples.size(); ++j)
    for (size_t i = 0; i < k; ++i)
      for (const auto& t : fam.gens[i].terms) {
        if (t.exponent < 0 || t.exponent.get_den() != 1) continue;
        const size_t d = static_cast<size_t>(t.exponent.get_num().get_ui());
        for (size_t b = 0; b < nb; ++b)
          pc[j][d].v[b] += mpq_class(tuples[j][i]) * t.coeff.v[b];
      }

  std::vector<std::vector<mpz_class>> irrational_rows;
  for (size_t d = 0; d < dsz; ++d) {
    std::vector<SymCoeff> col;
    for (size_t j = 0; j < tuples.size(); ++j) {
      SymCoeff tail{std::vector<mpq_class>(nb > 1 ? nb - 1 : 0, 0)};
      for (size_t b = 1; b < nb; ++b) tail.v[b - 1] = pc[j][d].v[b];
      col.push_back(std::move(tail));
    }
    if (nb > 1) append_split_rows(irrational_rows, col, nb - 1);
  }
  const auto rational_combos =
      integer_kernel(irrational_rows, tuples.size());

  PolyLattice out;
  out.integral = true;
  for (const auto& s : rational_combos) {
    std::vector<mpq_class> coeffs(dsz, 0);
    bool any = false;
    for (size_t j = 0; j < tuples.size(); ++j)
      for (size_t d = 0; d < dsz; ++d) {
        coeffs[d] += mpq_class(s[j]) * pc[j][d].v[0];
      }
    for (const auto& q : coeffs) {
      if (q != 0) any = true;
      if (q.get_den() != 1) out.integral = false;
    }
    if (any) out.basis.emplace_back(QPoly(coeffs));
  }

  // zero_excluded: the full coefficient map (all exponents, all basis
  // slots) has trivial integer kernel.
  std::vector<std::vector<mpz_class>> full_rows = rows;
  for (long d = 0; d <= max_deg; ++d) {
    std::vector<SymCoeff> col;
    for (size_t i = 0; i < k; ++i) col.push_back(coeff_at(i, mpq_class(d)));
    append_split_rows(full_rows, col, nb);
  }
  out.zero_excluded = integer_kernel(full_rows, k).empty();
  return out;
}

IntersectiveReport joint_intersective_check(const std::vector<QPoly>& polys,
                                            unsigned long max_modulus) {
  for (const auto& p : polys)
    for (const auto& q : p.c)
      if (q.get_den() != 1)
        throw UnsupportedShape(
            "intersectivity requires integer coefficients");
  IntersectiveReport rep{true, max_modulus, {}, 0};
  rep.witness.reserve(max_modulus);
  for (unsigned long m = 1; m <= max_modulus; ++m) {
    const mpz_class mod(m);
    unsigned long found = 0;
    // p(n) mod m is m-periodic, so [1, m] decides existence exactly.
    for (unsigned long n = 1; n <= m && found == 0; ++n) {
      bool all = true;
      for (const auto& p : polys) {
        mpz_class v = p(mpz_class(n)).get_num();
        if (v % mod != 0) {
          all = false;
          break;
        }
      }
      if (all) found = n;
    }
    rep.witness.push_back(found);
    if (found == 0 && rep.first_fail == 0) {
      rep.first_fail = m;
      rep.all_pass = false;
    }
  }
  return rep;
}

}  // namespace rlab::span
