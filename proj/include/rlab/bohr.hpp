#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rlab/exactreal.hpp"
#include "rlab/expr.hpp"

namespace rlab {

// E = { m >= 1 : ||phi_i * m|| < delta_i for all i }. Radii must be dyadic
// rationals in (0, 1/2). Construction classifies each frequency exactly
// (rational vs certified irrational), rejects radius/frequency boundary
// coincidences for rational frequencies (delta*q or 2*delta*q integral),
// and certifies Q-independence of {1} u {irrational frequencies} from the
// canonical forms when possible.
struct BohrSpec {
  struct Freq {
    ConstExpr value;
    std::optional<mpq_class> rational;  // exact value when certified rational
  };
  std::vector<Freq> freqs;
  std::vector<mpq_class> radii;
  bool independence_proved = false;

  static BohrSpec make(const std::vector<ConstExpr>& freqs,
                       const std::vector<mpq_class>& radii);

  size_t dim() const { return freqs.size(); }
  bool all_irrational() const;
  std::string to_string() const;  // canonical, parseable
};

// Elements of a set intersected with [1, horizon].
struct TruncatedSet {
  std::vector<unsigned long> elems;  // strictly increasing
  unsigned long horizon = 0;
  std::string provenance;  // canonical spec string or pipeline tag

  mpq_class density_exact() const {
    return horizon ? mpq_class(elems.size(), horizon) : mpq_class(0);
  }
  void write_csv(std::ostream& os) const;
  static TruncatedSet read_csv(std::istream& is);
};

// Exact membership decision; throws PrecisionExhausted if a certified
// comparison cannot be forced below cap_bits (does not happen for radii
// off the frequency orbits, which construction enforces where decidable).
bool member(const BohrSpec& spec, const mpz_class& m,
            long cap_bits = kDefaultPrecCap);

// Streaming scan engine: rational frequencies become a residue filter
// (exact), irrational ones 64-bit fixed-point windows with tracked slack,
// re-anchored exactly every 2^16 strides; membership decisions inside the
// slack margin escalate to member(). Used by enumeration, witness search
// and the experiment scans.
class BohrScanner {
 public:
  explicit BohrScanner(BohrSpec spec);

  // fn(m) for every member m in [1, N], increasing.
  void scan(unsigned long N, const std::function<void(unsigned long)>& fn) const;

  // Smallest m <= M with both m and m + r members; r >= 0.
  std::optional<unsigned long> find_pair(const mpz_class& r,
                                         unsigned long M) const;

  unsigned long modulus() const { return Q_; }
  const std::vector<unsigned long>& residues() const { return residues_; }
  const BohrSpec& spec() const { return spec_; }

 private:
  struct Irr {
    ConstExpr freq;
    std::uint64_t win = 0;            // delta * 2^64, exact for dyadic delta
    std::uint64_t step = 0;           // frac64(freq * Q)
    std::vector<std::uint64_t> offs;  // frac64(freq * res) per residue
  };
  BohrSpec spec_;
  unsigned long Q_ = 1;
  std::vector<unsigned long> residues_;
  std::vector<Irr> irr_;
};

TruncatedSet enumerate_with_density(const BohrSpec& spec, unsigned long N);

// Closed-form density (#admissible residues / Q) * prod(2 delta_i) over the
// certified-independent irrational block; UnsupportedStructure when
// independence is not certified.
ConstExpr density_theoretical(const BohrSpec& spec);

enum class DiffStatus { CertIn, CertOut, NeedWitness };

// Return-set membership test for the difference r: CertOut when some
// ||phi_i r|| >= 2 delta_i is certified (then E and E - r cannot meet),
// CertIn when all pass and the spec is fully independent irrational,
// NeedWitness otherwise.
DiffStatus return_diff_test(const BohrSpec& spec, const mpz_class& r,
                            long cap_bits = kDefaultPrecCap);

struct WitnessResult {
  std::optional<unsigned long> m;  // least witness if found
  unsigned long searched_to = 0;
};

// Search m <= M with m in E and m + r in E; found witnesses are re-verified
// by the exact member() path at doubled precision before being reported.
WitnessResult witness_search(const BohrSpec& spec, const mpz_class& r,
                             unsigned long M);

}  // namespace rlab
