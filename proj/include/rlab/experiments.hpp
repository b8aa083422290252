#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rlab/bohr.hpp"
#include "rlab/certify.hpp"
#include "rlab/hardy.hpp"
#include "rlab/spanfam.hpp"

namespace rlab {

// One experiment = constants (expression strings), horizons, caps, seed.
struct ExperimentConfig {
  std::string id = "thm-main";  // thm-main | thm-empty | thm-q65 | custom
  std::map<std::string, std::string> constants;
  unsigned long density_horizon = 1000000;  // E enumeration for densities
  unsigned long n_lo = 1, n_hi = 100000;    // return-table rows
  unsigned long witness_bound = 10000000;   // pair-search cap M
  unsigned long scan_cap = 100000000;       // auxiliary-set scan cap
  long prec_cap = kDefaultPrecCap;
  std::uint64_t seed = 20260814;
  std::string out_path;    // report JSON (empty: caller decides)
  std::string table_path;  // optional JSONL dump of the return table
  std::string set_path;    // optional CSV dump of the enumerated Bohr set

  static ExperimentConfig defaults(const std::string& id);
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Exact objects resolved from a config.
struct Instance {
  std::string id;
  RoundMode mode = RoundMode::Floor;
  ConstExpr lambda;
  mpq_class delta;

  // thm-main block.
  ConstExpr beta;
  mpq_class eta = 0;

  // emptiness block (thm-empty / thm-q65).
  ConstExpr xi, rho, Dbar;
  mpz_class L = 0;

  std::vector<IterateSeq> us;      // the iterated sequences u_i
  std::vector<ConstExpr> thetas;   // Bohr-reduction weights
  CPoly P;                         // the shadowed polynomial
  BohrSpec spec;                   // E
};

Instance make_instance(const ExperimentConfig& cfg);

// Generator family for the span sub-checks: id in {f, g, h}.
span::GenFamily make_family(const std::string& id, const ConstExpr& lambda,
                            const mpz_class& L, const ConstExpr& xi);

struct ConstraintRecord {
  std::string name;    // the inequality, in operand terms
  bool ok = false;
  std::string margin;  // certified enclosure of the slack
};

// Certifies every shipped inequality of the instance; throws
// ConstraintViolated naming the first failure.
std::vector<ConstraintRecord> validate_params(const ExperimentConfig& cfg);

struct ExperimentReport {
  nlohmann::json doc;
  // 0 = all assertions pass, 1 = violation, 2 = inconclusive (cap reached).
  int exit_code = 0;
};

ExperimentReport reproduce_thm_main(const ExperimentConfig& cfg);
ExperimentReport reproduce_thm_empty(const ExperimentConfig& cfg);
ExperimentReport reproduce_thm_q65(const ExperimentConfig& cfg);

// Dispatch on cfg.id; writes cfg.out_path / table_path / set_path when set.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace rlab
