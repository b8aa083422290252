#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "rlab/bohr.hpp"
#include "rlab/hardy.hpp"

namespace rlab {

enum class RetStatus { InWithWitness, InByTorus, NotFoundUpTo, CertOut };

std::string to_string(RetStatus s);

struct RetCell {
  RetStatus status = RetStatus::NotFoundUpTo;
  mpz_class r;                          // the difference u_i(n)
  std::optional<unsigned long> witness;  // least m for InWithWitness
  unsigned long bound = 0;               // search cap for NotFoundUpTo
};

// Per-n return-set membership of the differences u_i(n), n in [n_lo, n_hi].
struct ReturnTable {
  std::string spec_str;
  unsigned long n_lo = 1, n_hi = 0;
  unsigned long witness_bound = 0;
  std::vector<std::string> seq_names;
  std::vector<std::vector<RetCell>> rows;  // rows[n - n_lo][i]

  // n with every cell InWithWitness or InByTorus; horizon = n_hi.
  TruncatedSet intersection() const;
  void dump_jsonl(std::ostream& os) const;
};

// TorusFirst accepts certified-in differences without a witness; WitnessOnly
// demands an explicit pair for every non-excluded difference. Certified
// exclusions (CertOut) are decided the same way in both modes.
enum class TableMode { TorusFirst, WitnessOnly };

ReturnTable return_table(const BohrSpec& spec,
                         const std::vector<IterateSeq>& us,
                         unsigned long n_lo, unsigned long n_hi,
                         unsigned long witness_bound, TableMode mode);

// Intersection of truncated sets sharing one horizon (HorizonMismatch
// otherwise).
TruncatedSet intersect(const std::vector<TruncatedSet>& sets);

}  // namespace rlab
