#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rlab/exactreal.hpp"
#include "rlab/expr.hpp"
#include "rlab/polynomial.hpp"
#include "rlab/returnsets.hpp"

namespace rlab {

// Witness of non-thickness for {n : ||gamma*P(n)|| < eta}: once
// ||d! * a_d * gamma * h^d|| > 2^d * eta is certified, the finite-difference
// identity forces some j <= d with ||gamma*P(N+jh)|| >= eta in every window,
// so the set contains no interval of length d*h + 1.
struct NonThickCert {
  ConstExpr gamma;
  CPoly P;
  mpq_class eta;  // 0 < eta < 2^-(d+1)
  unsigned long h = 0;
  DyadicInterval norm_enclosure;  // certified ||d! a_d gamma h^d||

  unsigned long max_run_bound() const {
    return static_cast<unsigned long>(P.degree()) * h;
  }

  nlohmann::json to_json() const;
  static NonThickCert from_json(const nlohmann::json& j);
  // Re-certifies the defining inequality from the stored constants.
  bool recheck(long cap_bits = kDefaultPrecCap) const;
};

// Minimal h <= h_max satisfying the NonThickCert inequality; gamma * a_d must
// be certifiably irrational and 0 < eta < 2^-(d+1).
std::optional<NonThickCert> find_nonthick_h(const ConstExpr& gamma,
                                            const CPoly& P,
                                            const mpq_class& eta,
                                            unsigned long h_max,
                                            long cap_bits = kDefaultPrecCap);

// Exact identity sum_{j=0..d} (-1)^(d-j) C(d,j) P(N+jh) == d! * a_d * h^d.
bool finite_difference_check(const QPoly& P, const mpz_class& N,
                             const mpz_class& h);

// Every n in the table's intersection violating ||beta*P(n)|| < eta,
// certified; empty result means the inclusion holds on the table's range.
std::vector<unsigned long> verify_inclusion(const ReturnTable& table,
                                            const ConstExpr& beta,
                                            const CPoly& P,
                                            const mpq_class& eta,
                                            long cap_bits = kDefaultPrecCap);

// Obstruction certificate: |sum_i theta_i u_i(n) - P(n)| <= Dbar and
// beta*Dbar < rho while ||beta*P(n)|| >= rho, so no n can have every
// difference u_i(n) in the return set of a Bohr set with small enough radii.
struct EmptyCert {
  std::vector<ConstExpr> thetas;
  CPoly P;
  ConstExpr Dbar, beta, rho;

  nlohmann::json to_json() const;
  static EmptyCert from_json(const nlohmann::json& j);
};

struct EmptyVerdict {
  bool norm_bound_symbolic = false;  // ||beta*P(n)|| >= rho proved for all n
  mpz_class dev_argmax;              // where the deviation scan peaked
  mpq_class dev_max_ub;              // certified upper bound of the peak
};

// Certifies beta*Dbar < rho, the norm lower bound (symbolic when
// beta * leading(P) is an integer and P is affine, sampled otherwise), and
// the deviation bound over [dev_lo, dev_hi]. Throws CertInvalid naming the
// first failing inequality.
EmptyVerdict check_empty_cert(const EmptyCert& cert,
                              const std::vector<IterateSeq>& us,
                              const mpz_class& dev_lo, const mpz_class& dev_hi,
                              long cap_bits = kDefaultPrecCap);

// Smallest N <= search_cap with {N,...,N+H} inside every
// {n : ||c_j * n^(3/2)|| < eta}: Taylor conditions at N prefilter the scan,
// then each element is verified directly. nullopt is an honest "not found
// below the cap", not a disproof.
std::optional<unsigned long> find_thick_interval(
    const std::vector<ConstExpr>& cs, const mpq_class& eta, unsigned long H,
    unsigned long search_cap, long cap_bits = kDefaultPrecCap);

// |(1/N) sum_{n<=N} e^(2*pi*i*c*n^g)| for g in {1/2, 3/2}. Deliberately
// non-rigorous floating diagnostic; never feeds a certified verdict.
double weyl_sum(const ConstExpr& c, const mpq_class& g, unsigned long N);

}  // namespace rlab
