#include "rlab/certify.hpp"

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

mpz_class factorial(unsigned long d) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), d);
  return f;
}

mpz_class pow_ui(const mpz_class& b, unsigned long e) {
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

// d! * a_d * gamma * h^d as an expression.
ConstExpr cert_value(const ConstExpr& gamma, const CPoly& P, unsigned long h) {
  const auto d = static_cast<unsigned long>(P.degree());
  return ConstExpr(mpq_class(factorial(d))) * P.c.back() * gamma *
         ConstExpr(mpq_class(pow_ui(mpz_class(h), d)));
}

// ||e|| >= t decided via the nearest-integer offset; exact at equality.
// Returns +1 / 0 (>= holds with margin / exactly) or -1.
int norm_ge(const ConstExpr& e, const ConstExpr& t, long cap_bits) {
  mpz_class k = nearest_exact(e, cap_bits);
  ConstExpr off = e - ConstExpr(mpq_class(k));
  std::optional<int> s = sign_exact(off, cap_bits);
  if (!s) throw PrecisionExhausted("norm_ge: offset sign undecided");
  ConstExpr norm = *s < 0 ? ConstExpr(0) - off : off;
  std::optional<int> c = sign_exact(norm - t, cap_bits);
  if (!c) throw PrecisionExhausted("norm_ge: comparison undecided");
  return *c;
}

std::string poly_str(const CPoly& P) {
  std::string s = "[";
  for (std::size_t i = 0; i < P.c.size(); ++i) {
    if (i) s += ", ";
    s += P.c[i].str();
  }
  return s + "]";
}

}  // namespace

nlohmann::json NonThickCert::to_json() const {
  nlohmann::json j;
  j["type"] = "nonthick";
  j["gamma"] = gamma.str();
  auto coeffs = nlohmann::json::array();
  for (const ConstExpr& c : P.c) coeffs.push_back(c.str());
  j["poly"] = std::move(coeffs);
  j["eta"] = eta.get_str();
  j["h"] = h;
  j["norm_lo"] = norm_enclosure.lo().to_mpq().get_str();
  j["norm_hi"] = norm_enclosure.hi().to_mpq().get_str();
  return j;
}

NonThickCert NonThickCert::from_json(const nlohmann::json& j) {
  if (j.at("type") != "nonthick")
    throw ParseError("NonThickCert: wrong certificate type");
  NonThickCert c;
  c.gamma = parse_const_expr(j.at("gamma").get<std::string>());
  std::vector<ConstExpr> coeffs;
  for (const auto& s : j.at("poly"))
    coeffs.push_back(parse_const_expr(s.get<std::string>()));
  c.P = CPoly(std::move(coeffs));
  c.eta = mpq_class(j.at("eta").get<std::string>());
  c.eta.canonicalize();
  c.h = j.at("h").get<unsigned long>();
  mpq_class lo(j.at("norm_lo").get<std::string>());
  mpq_class hi(j.at("norm_hi").get<std::string>());
  lo.canonicalize();
  hi.canonicalize();
  c.norm_enclosure = DyadicInterval(Dyadic::from_mpq(lo), Dyadic::from_mpq(hi));
  return c;
}

bool NonThickCert::recheck(long cap_bits) const {
  if (P.degree() < 1 || h == 0) return false;
  const int d = P.degree();
  mpq_class t = eta * mpq_class(pow_ui(2, static_cast<unsigned long>(d)));
  return compare_torus(cert_value(gamma, P, h), t, cap_bits) == Cmp::Above;
}

std::optional<NonThickCert> find_nonthick_h(const ConstExpr& gamma,
                                            const CPoly& P,
                                            const mpq_class& eta,
                                            unsigned long h_max,
                                            long cap_bits) {
  const int d = P.degree();
  if (d < 1) throw std::invalid_argument("find_nonthick_h: degree must be >= 1");
  mpq_class cap(1, pow_ui(2, static_cast<unsigned long>(d) + 1));
  if (!(eta > 0 && eta < cap))
    throw std::invalid_argument("find_nonthick_h: need 0 < eta < 2^-(d+1)");
  ConstExpr lead_prod = gamma * P.c.back();
  if (!lead_prod.form() || lead_prod.form()->is_rational())
    throw std::invalid_argument(
        "find_nonthick_h: gamma * leading coefficient not certified "
        "irrational");

  mpq_class t = eta * mpq_class(pow_ui(2, static_cast<unsigned long>(d)));
  for (unsigned long h = 1; h <= h_max; ++h) {
    ConstExpr v = cert_value(gamma, P, h);
    switch (compare_torus(v, t, cap_bits)) {
      case Cmp::Above: {
        NonThickCert cert;
        cert.gamma = gamma;
        cert.P = P;
        cert.eta = eta;
        cert.h = h;
        cert.norm_enclosure = torus_norm(v, 64).enclosure;
        return cert;
      }
      case Cmp::Below:
        break;
      case Cmp::Unknown:
        // Minimality would be unfounded past an undecided h.
        throw PrecisionExhausted("find_nonthick_h: undecided at h=" +
                                 std::to_string(h));
    }
  }
  return std::nullopt;
}

bool finite_difference_check(const QPoly& P, const mpz_class& N,
                             const mpz_class& h) {
  if (P.is_zero())
    throw std::invalid_argument("finite_difference_check: zero polynomial");
  const auto d = static_cast<unsigned long>(P.degree());
  mpq_class lhs = 0;
  for (unsigned long j = 0; j <= d; ++j) {
    mpz_class bin;
    mpz_bin_uiui(bin.get_mpz_t(), d, j);
    mpq_class term = mpq_class(bin) * P(N + mpz_class(j) * h);
    if ((d - j) % 2 == 1) term = -term;
    lhs += term;
  }
  mpq_class rhs = mpq_class(factorial(d)) * P.leading() * mpq_class(pow_ui(h, d));
  return lhs == rhs;
}

std::vector<unsigned long> verify_inclusion(const ReturnTable& table,
                                            const ConstExpr& beta,
                                            const CPoly& P,
                                            const mpq_class& eta,
                                            long cap_bits) {
  std::vector<unsigned long> bad;
  TruncatedSet S = table.intersection();
  for (unsigned long n : S.elems) {
    ConstExpr v = beta * P(mpz_class(n));
    switch (compare_torus(v, eta, cap_bits)) {
      case Cmp::Below:
        break;
      case Cmp::Above:
        bad.push_back(n);
        break;
      case Cmp::Unknown:
        throw PrecisionExhausted("verify_inclusion: undecided at n=" +
                                 std::to_string(n));
    }
  }
  return bad;
}

nlohmann::json EmptyCert::to_json() const {
  nlohmann::json j;
  j["type"] = "empty";
  auto th = nlohmann::json::array();
  for (const ConstExpr& t : thetas) th.push_back(t.str());
  j["theta"] = std::move(th);
  auto coeffs = nlohmann::json::array();
  for (const ConstExpr& c : P.c) coeffs.push_back(c.str());
  j["poly"] = std::move(coeffs);
  j["Dbar"] = Dbar.str();
  j["beta"] = beta.str();
  j["rho"] = rho.str();
  return j;
}

EmptyCert EmptyCert::from_json(const nlohmann::json& j) {
  if (j.at("type") != "empty")
    throw ParseError("EmptyCert: wrong certificate type");
  EmptyCert c;
  for (const auto& s : j.at("theta"))
    c.thetas.push_back(parse_const_expr(s.get<std::string>()));
  std::vector<ConstExpr> coeffs;
  for (const auto& s : j.at("poly"))
    coeffs.push_back(parse_const_expr(s.get<std::string>()));
  c.P = CPoly(std::move(coeffs));
  c.Dbar = parse_const_expr(j.at("Dbar").get<std::string>());
  c.beta = parse_const_expr(j.at("beta").get<std::string>());
  c.rho = parse_const_expr(j.at("rho").get<std::string>());
  return c;
}

EmptyVerdict check_empty_cert(const EmptyCert& cert,
                              const std::vector<IterateSeq>& us,
                              const mpz_class& dev_lo, const mpz_class& dev_hi,
                              long cap_bits) {
  if (us.size() != cert.thetas.size())
    throw std::invalid_argument("check_empty_cert: theta/sequence mismatch");
  if (dev_lo < 1 || dev_lo > dev_hi)
    throw std::invalid_argument("check_empty_cert: bad deviation range");

  // beta * Dbar < rho.
  std::optional<int> s =
      sign_exact(cert.rho - cert.beta * cert.Dbar, cap_bits);
  if (!s) throw PrecisionExhausted("check_empty_cert: beta*Dbar vs rho");
  if (*s <= 0)
    throw CertInvalid("beta*Dbar < rho fails: beta=" + cert.beta.str() +
                      " Dbar=" + cert.Dbar.str() + " rho=" + cert.rho.str());

  EmptyVerdict verdict;

  // ||beta*P(n)|| >= rho: constant in n when beta*leading is an integer and
  // P is affine, since then beta*P(n) shifts by integers only.
  bool symbolic = false;
  if (cert.P.degree() == 1) {
    std::optional<mpq_class> slope = (cert.beta * cert.P.c[1]).as_rational();
    symbolic = slope && slope->get_den() == 1;
  }
  if (symbolic) {
    if (norm_ge(cert.beta * cert.P.c[0], cert.rho, cap_bits) < 0)
      throw CertInvalid("norm(beta*P) >= rho fails (constant term): P=" +
                        poly_str(cert.P));
    verdict.norm_bound_symbolic = true;
  } else {
    for (mpz_class n = dev_lo; n <= dev_hi; ++n) {
      if (norm_ge(cert.beta * cert.P(n), cert.rho, cap_bits) < 0)
        throw CertInvalid("norm(beta*P) >= rho fails at n=" + n.get_str());
    }
    verdict.norm_bound_symbolic = false;
  }

  // max |sum theta_i u_i(n) - P(n)| <= Dbar on the requested range.
  DeviationReport rep =
      combo_deviation(us, cert.thetas, cert.P, dev_lo, dev_hi, 96);
  mpq_class ub = rep.max_abs.hi().to_mpq();
  std::optional<int> ds =
      sign_exact(cert.Dbar - ConstExpr(ub), cap_bits);
  if (!ds) throw PrecisionExhausted("check_empty_cert: deviation vs Dbar");
  if (*ds < 0)
    throw CertInvalid("deviation <= Dbar fails near n=" +
                      rep.argmax.get_str() + " (observed <= " + ub.get_str() +
                      ")");
  verdict.dev_argmax = rep.argmax;
  verdict.dev_max_ub = ub;
  return verdict;
}

namespace {

// Surd view of c as q*sqrt(r); nullopt routes to the tree-based fallback.
std::optional<std::pair<mpq_class, mpz_class>> surd_of(const ConstExpr& c) {
  if (!c.form()) return std::nullopt;
  return c.form()->as_single_surd();
}

// ||c * sqrt(rad_factor * n^pow)|| < t, certified.
bool norm_below(const ConstExpr& c,
                const std::optional<std::pair<mpq_class, mpz_class>>& surd,
                const mpz_class& n, unsigned long pow, const mpq_class& t,
                long cap_bits) {
  if (surd)
    return norm_surd_compare(surd->first, surd->second * pow_ui(n, pow), t,
                             cap_bits) == Cmp::Below;
  ConstExpr v = c * ConstExpr::sqrt(ConstExpr(mpq_class(pow_ui(n, pow))));
  return compare_torus(v, t, cap_bits) == Cmp::Below;
}

}  // namespace

std::optional<unsigned long> find_thick_interval(
    const std::vector<ConstExpr>& cs, const mpq_class& eta, unsigned long H,
    unsigned long search_cap, long cap_bits) {
  if (cs.empty()) throw std::invalid_argument("find_thick_interval: no frequencies");
  if (!(eta > 0)) throw std::invalid_argument("find_thick_interval: eta <= 0");
  if (H == 0) throw std::invalid_argument("find_thick_interval: H must be positive");

  std::vector<std::optional<std::pair<mpq_class, mpz_class>>> surds;
  surds.reserve(cs.size());
  mpq_class cmax = 0;
  for (const ConstExpr& c : cs) {
    surds.push_back(surd_of(c));
    DyadicInterval iv = eval_interval(c, 64);
    mpq_class m = std::max(abs(iv.lo().to_mpq()), abs(iv.hi().to_mpq()));
    cmax = std::max(cmax, m);
  }

  // Taylor remainder over [N, N+H]: each (N+i)^(3/2) differs from
  // N^(3/2) + (3/2)N^(1/2) i by at most (3/8) i^2 N^(-1/2), so
  // (3/8) H^2 cmax N^(-1/2) < eta/3 clears the error term for every c_j.
  mpz_class start(1);
  if (cmax > 0) {
    mpq_class root = mpq_class(9) * mpq_class(H) * mpq_class(H) * cmax /
                     (mpq_class(8) * eta);
    mpq_class thr = root * root;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), thr.get_num().get_mpz_t(),
               thr.get_den().get_mpz_t());
    start = fl + 1;
  }
  if (start > search_cap) return std::nullopt;

  const mpq_class eta3 = eta / 3;
  const mpq_class etaH = eta / (3 * mpq_class(H));
  for (mpz_class N = start; N <= search_cap; ++N) {
    bool ok = true;
    for (std::size_t j = 0; j < cs.size() && ok; ++j) {
      // ||(3/2) c_j sqrt(N)|| < eta/(3H), then ||c_j N^(3/2)|| < eta/3.
      if (surds[j]) {
        ok = norm_surd_compare(surds[j]->first * mpq_class(3, 2),
                               surds[j]->second * N, etaH,
                               cap_bits) == Cmp::Below &&
             norm_below(cs[j], surds[j], N, 3, eta3, cap_bits);
      } else {
        ConstExpr half = ConstExpr(mpq_class(3, 2)) * cs[j] *
                         ConstExpr::sqrt(ConstExpr(mpq_class(N)));
        ok = compare_torus(half, etaH, cap_bits) == Cmp::Below &&
             norm_below(cs[j], surds[j], N, 3, eta3, cap_bits);
      }
    }
    if (!ok) continue;
    // Candidate: verify every element of {N, ..., N+H} directly.
    bool verified = true;
    const mpz_class top = N + H;
    for (mpz_class m = N; verified && m <= top; ++m)
      for (std::size_t j = 0; j < cs.size() && verified; ++j)
        verified = norm_below(cs[j], surds[j], m, 3, eta, cap_bits);
    if (verified) return N.get_ui();
  }
  return std::nullopt;
}

double weyl_sum(const ConstExpr& c, const mpq_class& g, unsigned long N) {
  const bool half = g == mpq_class(1, 2);
  if (!half && g != mpq_class(3, 2))
    throw std::invalid_argument("weyl_sum: exponent must be 1/2 or 3/2");
  if (N < 1) throw std::invalid_argument("weyl_sum: N must be >= 1");
  const unsigned long pow = half ? 1 : 3;
  const long double tau = 6.283185307179586476925286766559L;

  long double sr = 0.0L, si = 0.0L;
  std::optional<std::pair<mpq_class, mpz_class>> surd = surd_of(c);
  if (surd) {
    // frac(q * sqrt(rad * n^pow)) via integer square roots at 64 guard bits.
    const int kG = 64;
    const mpz_class& a = surd->first.get_num();
    mpz_class den = surd->first.get_den() << kG;
    for (unsigned long n = 1; n <= N; ++n) {
      mpz_class rad = surd->second * pow_ui(n, pow);
      mpz_class s = isqrt(rad << (2 * kG));
      mpz_class rem;
      mpz_fdiv_r(rem.get_mpz_t(), mpz_class(a * s).get_mpz_t(),
                 den.get_mpz_t());
      long double x = static_cast<long double>(mpz_get_d(rem.get_mpz_t())) /
                      static_cast<long double>(mpz_get_d(den.get_mpz_t()));
      sr += cosl(tau * x);
      si += sinl(tau * x);
    }
  } else {
    DyadicInterval iv = eval_interval(c, 96);
    long double cd = static_cast<long double>(iv.lo().to_mpq().get_d());
    long double ex = half ? 0.5L : 1.5L;
    for (unsigned long n = 1; n <= N; ++n) {
      long double x = fmodl(cd * powl(static_cast<long double>(n), ex), 1.0L);
      sr += cosl(tau * x);
      si += sinl(tau * x);
    }
  }
  return static_cast<double>(hypotl(sr, si) / static_cast<long double>(N));
}

}  // namespace rlab
