#include "rlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "rlab/errors.hpp"
#include "rlab/largeness.hpp"
#include "rlab/returnsets.hpp"

namespace rlab {

namespace {

using nlohmann::json;

ConstExpr parse_constant(const ExperimentConfig& cfg, const std::string& key) {
  auto it = cfg.constants.find(key);
  if (it == cfg.constants.end())
    throw std::invalid_argument(cfg.id + ": missing constant '" + key + "'");
  return parse_const_expr(it->second);
}

mpq_class rational_constant(const ExperimentConfig& cfg,
                            const std::string& key) {
  auto r = parse_constant(cfg, key).as_rational();
  if (!r)
    throw std::invalid_argument(cfg.id + ": constant '" + key +
                                "' must be rational");
  return *r;
}

ConstExpr abs_expr(const ConstExpr& e, long cap) {
  auto s = sign_exact(e, cap);
  if (!s) throw PrecisionExhausted("abs_expr: sign undecided");
  return *s < 0 ? -e : e;
}

// ||e|| as an expression (distance to the nearest integer).
ConstExpr norm_expr(const ConstExpr& e, long cap) {
  mpz_class k = nearest_exact(e, cap);
  return abs_expr(e - ConstExpr(mpq_class(k)), cap);
}

ConstExpr max1_expr(const ConstExpr& e, long cap) {
  auto s = sign_exact(e - ConstExpr(1), cap);
  if (!s) throw PrecisionExhausted("max1_expr: comparison undecided");
  return *s >= 0 ? e : ConstExpr(1);
}

std::string enclosure_str(const ConstExpr& e, long bits = 64) {
  DyadicInterval iv = eval_interval(e, bits);
  return "[" + iv.lo().to_mpq().get_str() + ", " + iv.hi().to_mpq().get_str() +
         "]";
}

// diff > 0, certified; records the enclosure of the slack as the margin.
ConstraintRecord positivity_record(const std::string& name,
                                   const ConstExpr& diff, long cap) {
  auto s = sign_exact(diff, cap);
  if (!s)
    throw PrecisionExhausted("validate_params: '" + name + "' undecided");
  return ConstraintRecord{name, *s > 0, enclosure_str(diff)};
}

void require(std::vector<ConstraintRecord>& records, ConstraintRecord rec) {
  records.push_back(rec);
  if (!rec.ok)
    throw ConstraintViolated("constraint failed: " + rec.name +
                             ", slack in " + rec.margin);
}

std::string now_rfc3339() {
  std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

json constraints_json(const std::vector<ConstraintRecord>& records) {
  json arr = json::array();
  for (const auto& r : records)
    arr.push_back({{"name", r.name}, {"ok", r.ok}, {"margin", r.margin}});
  return arr;
}

// Enumerates E, compares the empirical density against the closed form with
// tolerance tol (relative), optionally dumps the set.
json density_section(const Instance& inst, unsigned long horizon,
                     const mpq_class& tol, const std::string& set_path,
                     std::vector<std::string>& violations) {
  TruncatedSet E = enumerate_with_density(inst.spec, horizon);
  if (!set_path.empty()) {
    std::ofstream os(set_path);
    if (!os) throw std::runtime_error("cannot write " + set_path);
    E.write_csv(os);
  }
  mpq_class emp = E.density_exact();
  auto theo = density_theoretical(inst.spec).as_rational();
  if (!theo)
    throw AssertionFailed("density_theoretical unexpectedly irrational");
  bool ok = abs(emp - *theo) <= *theo * tol;
  if (!ok)
    violations.push_back("density: empirical " + emp.get_str() +
                         " deviates more than " + tol.get_str() +
                         " relative from " + theo->get_str());
  json j;
  j["horizon"] = horizon;
  j["size"] = E.elems.size();
  j["empirical"] = emp.get_str();
  j["theoretical"] = theo->get_str();
  j["relative_tolerance"] = tol.get_str();
  j["ok"] = ok;
  return j;
}

json table_section(const ReturnTable& table, const TruncatedSet& S) {
  std::map<std::string, unsigned long> counts;
  for (const auto& row : table.rows)
    for (const auto& cell : row) ++counts[to_string(cell.status)];
  json j;
  j["n_lo"] = table.n_lo;
  j["n_hi"] = table.n_hi;
  j["witness_bound"] = table.witness_bound;
  j["status_counts"] = counts;
  j["intersection_size"] = S.elems.size();
  json first = json::array();
  for (size_t i = 0; i < S.elems.size() && i < 20; ++i)
    first.push_back(S.elems[i]);
  j["intersection_first"] = std::move(first);
  return j;
}

json largeness_json(const TruncatedSet& s, unsigned long pws_gap) {
  LargenessReport rep = run_gap_profile(s);
  PwsWindow w = pws_profile(s, pws_gap);
  json j;
  j["max_run"] = rep.max_run_len;
  j["max_run_start"] = rep.max_run_start;
  j["max_gap"] = rep.max_gap;
  j["max_gap_at"] = rep.max_gap_at;
  j["pws"] = {{"gap_bound", pws_gap},
              {"start", w.start},
              {"end", w.end},
              {"length", w.length()},
              {"count", w.count}};
  return j;
}

// Classification sweep used inside pipelines: exhaustive single-derivative
// matrices plus seeded samples of deeper ones; everything must land in
// {ZeroFunction, LimitZero, LimitInfinity}.
json span_subcheck(const span::GenFamily& fam, std::uint64_t seed,
                   std::vector<std::string>& violations) {
  std::map<std::string, unsigned long> counts;
  auto classify = [&](const std::vector<std::vector<mpz_class>>& c) {
    span::Classification cl = span::classify_limit(integer_combination(fam, c));
    switch (cl.cls) {
      case span::LimitClass::ZeroFunction: ++counts["ZeroFunction"]; break;
      case span::LimitClass::LimitZero: ++counts["LimitZero"]; break;
      case span::LimitClass::LimitInfinity: ++counts["LimitInfinity"]; break;
      case span::LimitClass::FiniteNonzero:
        ++counts["FiniteNonzero"];
        violations.push_back("span: finite nonzero limit reached");
        break;
    }
  };
  for (long a = -10; a <= 10; ++a)
    for (long b = -10; b <= 10; ++b)
      classify({{mpz_class(a)}, {mpz_class(b)}});
  std::mt19937_64 rng(seed);
  for (int t = 0; t < 512; ++t) {
    size_t M = 2 + static_cast<size_t>(rng() % 4);  // derivative orders 0..M
    std::vector<std::vector<mpz_class>> c(2);
    for (auto& row : c)
      for (size_t m = 0; m <= M; ++m)
        row.push_back(mpz_class(static_cast<long>(rng() % 21) - 10));
    classify(c);
  }
  json j;
  j["counts"] = counts;
  j["exhaustive_order0"] = 441;
  j["sampled"] = 512;
  return j;
}

// Planted fully-independent spec: CERT_IN answers must be realized by
// explicit witnesses. Fallback evidence for the B-cap-limited clause.
bool synthetic_certin_check(std::uint64_t seed, int instances,
                            std::string& detail) {
  BohrSpec spec = BohrSpec::make(
      {ConstExpr::sqrt(ConstExpr(2)) / ConstExpr(64),
       ConstExpr::sqrt(ConstExpr(3)) / ConstExpr(64)},
      {mpq_class(1, 8), mpq_class(1, 8)});
  BohrScanner sc(spec);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  int cert_in = 0;
  for (int t = 0; t < instances; ++t) {
    mpz_class r(static_cast<unsigned long>(rng() % 1000000));
    if (return_diff_test(spec, r) != DiffStatus::CertIn) continue;
    ++cert_in;
    if (!sc.find_pair(r, 1000000)) {
      detail = "CERT_IN r=" + r.get_str() + " had no witness <= 1e6";
      return false;
    }
  }
  detail = "verified " + std::to_string(cert_in) + " CERT_IN instances of " +
           std::to_string(instances);
  return cert_in >= instances / 8;
}

json cfg_echo(const ExperimentConfig& cfg) { return cfg.to_json(); }

void finish(json& doc, const Timer& timer,
            const std::vector<std::string>& violations,
            ExperimentReport& rep) {
  doc["violations"] = violations;
  doc["timestamp"] = {{"generated", now_rfc3339()},
                      {"elapsed_seconds", timer.seconds()}};
  rep.exit_code = violations.empty() ? 0 : 1;
  rep.doc = std::move(doc);
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentReport& rep) {
  if (cfg.out_path.empty()) return;
  std::ofstream os(cfg.out_path);
  if (!os) throw std::runtime_error("cannot write " + cfg.out_path);
  os << rep.doc.dump(2) << '\n';
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(const std::string& id) {
  ExperimentConfig cfg;
  cfg.id = id;
  if (id == "thm-main") {
    cfg.constants = {{"lambda", "sqrt(2)"},
                     {"delta", "3/64"},
                     {"beta", "sqrt(3)/4096"},
                     {"eta", "23/512"}};
    cfg.n_hi = 100000;
    cfg.scan_cap = 100000000;
  } else if (id == "thm-empty" || id == "thm-q65") {
    cfg.constants = {{"lambda", "sqrt(2)"},
                     {"xi", "sqrt(2)"},
                     {"L", "6"},
                     {"delta", "1/512"}};
    cfg.n_hi = 10000;
    cfg.scan_cap = 1000000;
  } else if (id != "custom") {
    throw std::invalid_argument("unknown experiment id: " + id);
  }
  return cfg;
}

json ExperimentConfig::to_json() const {
  json j;
  j["id"] = id;
  j["constants"] = constants;
  j["density_horizon"] = density_horizon;
  j["n_lo"] = n_lo;
  j["n_hi"] = n_hi;
  j["witness_bound"] = witness_bound;
  j["scan_cap"] = scan_cap;
  j["prec_cap"] = prec_cap;
  j["seed"] = seed;
  j["out_path"] = out_path;
  j["table_path"] = table_path;
  j["set_path"] = set_path;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig cfg = defaults(j.at("id").get<std::string>());
  if (j.contains("constants"))
    for (const auto& [k, v] : j.at("constants").items())
      cfg.constants[k] = v.get<std::string>();
  if (j.contains("density_horizon"))
    cfg.density_horizon = j.at("density_horizon").get<unsigned long>();
  if (j.contains("n_lo")) cfg.n_lo = j.at("n_lo").get<unsigned long>();
  if (j.contains("n_hi")) cfg.n_hi = j.at("n_hi").get<unsigned long>();
  if (j.contains("witness_bound"))
    cfg.witness_bound = j.at("witness_bound").get<unsigned long>();
  if (j.contains("scan_cap")) cfg.scan_cap = j.at("scan_cap").get<unsigned long>();
  if (j.contains("prec_cap")) cfg.prec_cap = j.at("prec_cap").get<long>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("out_path")) cfg.out_path = j.at("out_path").get<std::string>();
  if (j.contains("table_path"))
    cfg.table_path = j.at("table_path").get<std::string>();
  if (j.contains("set_path")) cfg.set_path = j.at("set_path").get<std::string>();
  return cfg;
}

Instance make_instance(const ExperimentConfig& cfg) {
  Instance inst;
  inst.id = cfg.id;
  inst.lambda = parse_constant(cfg, "lambda");
  inst.delta = rational_constant(cfg, "delta");
  const long cap = cfg.prec_cap;

  if (cfg.id == "thm-main") {
    inst.beta = parse_constant(cfg, "beta");
    inst.eta = rational_constant(cfg, "eta");
    inst.us = {
        IterateSeq{HardyCombo({{ConstExpr(1), mpq_class(3, 2)}}),
                   RoundMode::Floor, "u1"},
        IterateSeq{HardyCombo({{inst.lambda, mpq_class(3, 2)},
                               {ConstExpr(1), mpq_class(1)}}),
                   RoundMode::Floor, "u2"}};
    inst.thetas = {-inst.lambda, ConstExpr(1)};
    inst.P = CPoly({ConstExpr(0), ConstExpr(1)});
    inst.spec = BohrSpec::make({inst.beta, inst.lambda * inst.beta},
                               {inst.delta, inst.delta});
    return inst;
  }
  if (cfg.id == "thm-empty" || cfg.id == "thm-q65") {
    inst.mode = cfg.id == "thm-q65" ? RoundMode::Nearest : RoundMode::Floor;
    inst.xi = parse_constant(cfg, "xi");
    mpq_class lq = rational_constant(cfg, "L");
    if (lq.get_den() != 1 || lq <= 0)
      throw std::invalid_argument(cfg.id + ": L must be a positive integer");
    inst.L = lq.get_num();
    inst.beta = ConstExpr(mpq_class(1, inst.L));
    inst.rho = norm_expr(inst.xi, cap);
    inst.Dbar = ConstExpr(1) + abs_expr(inst.lambda, cap);
    ConstExpr Lc{mpq_class(inst.L)};
    inst.us = {
        IterateSeq{HardyCombo({{ConstExpr(1), mpq_class(3, 2)}}), inst.mode,
                   "u1"},
        IterateSeq{HardyCombo({{inst.lambda, mpq_class(3, 2)},
                               {Lc, mpq_class(1)},
                               {Lc * inst.xi, mpq_class(0)}}),
                   inst.mode, "u2"}};
    if (cfg.id == "thm-q65")
      inst.us.push_back(IterateSeq{HardyCombo({{ConstExpr(1), mpq_class(2)}}),
                                   RoundMode::Nearest, "u3"});
    inst.thetas = {-inst.lambda, ConstExpr(1)};
    inst.P = CPoly({Lc * inst.xi, Lc});
    inst.spec = BohrSpec::make(
        {abs_expr(inst.lambda * inst.beta, cap), inst.beta},
        {inst.delta, inst.delta});
    return inst;
  }
  throw std::invalid_argument("make_instance: no pipeline for id " + cfg.id);
}

span::GenFamily make_family(const std::string& id, const ConstExpr& lambda,
                            const mpz_class& L, const ConstExpr& xi) {
  span::GenFamily fam;
  fam.basis_names = {"1", "lambda"};
  fam.basis_values = {ConstExpr(1), lambda};
  auto coeff = [](const mpq_class& one, const mpq_class& lam) {
    return span::SymCoeff{{one, lam}};
  };
  span::Generator g1{"g1", {{coeff(1, 0), mpq_class(3, 2)}}};
  if (id == "f") {
    span::Generator f2{"f2",
                       {{coeff(0, 1), mpq_class(3, 2)},
                        {coeff(1, 0), mpq_class(1)}}};
    fam.gens = {g1, f2};
  } else if (id == "g" || id == "h") {
    // Constant term L*xi decomposed over {1, lambda}.
    mpq_class c0 = 0, c1 = 0;
    if (auto r = xi.as_rational()) {
      c0 = *r * mpq_class(L);
    } else if (auto q = (xi / lambda).as_rational()) {
      c1 = *q * mpq_class(L);
    } else {
      throw UnsupportedShape("make_family: xi outside span{1, lambda}");
    }
    span::Generator g2{"g2",
                       {{coeff(0, 1), mpq_class(3, 2)},
                        {coeff(mpq_class(L), 0), mpq_class(1)},
                        {coeff(c0, c1), mpq_class(0)}}};
    fam.gens = {g1, g2};
    if (id == "h") {
      span::Generator h3{"h3", {{coeff(1, 0), mpq_class(2)}}};
      fam.gens.push_back(h3);
    }
  } else {
    throw std::invalid_argument("make_family: unknown id " + id);
  }
  fam.validate();
  return fam;
}

std::vector<ConstraintRecord> validate_params(const ExperimentConfig& cfg) {
  const long cap = cfg.prec_cap;
  std::vector<ConstraintRecord> records;
  ConstExpr lambda = parse_constant(cfg, "lambda");
  if (!lambda.form() || lambda.form()->is_rational())
    throw ConstraintViolated("lambda must be certified irrational");
  records.push_back({"lambda irrational", true, "exact (canonical form)"});
  mpq_class delta = rational_constant(cfg, "delta");
  if (!Dyadic::mpq_is_dyadic(delta))
    throw ConstraintViolated("delta must be dyadic: " + delta.get_str());
  records.push_back({"delta dyadic", true, "exact"});

  if (cfg.id == "thm-main") {
    ConstExpr beta = parse_constant(cfg, "beta");
    mpq_class eta = rational_constant(cfg, "eta");
    if (!Dyadic::mpq_is_dyadic(eta))
      throw ConstraintViolated("eta must be dyadic: " + eta.get_str());
    ConstExpr d{delta}, e{eta};
    require(records, positivity_record("delta > 0", d, cap));
    require(records,
            positivity_record("delta < 1/20", ConstExpr(mpq_class(1, 20)) - d,
                              cap));
    require(records, positivity_record("beta > 0", beta, cap));
    require(records,
            positivity_record("beta < delta/(1+lambda)",
                              d / (ConstExpr(1) + lambda) - beta, cap));
    require(records, positivity_record("eta > 0", e, cap));
    require(records,
            positivity_record("2*eta + max(1,lambda)*beta < 2*delta",
                              ConstExpr(2) * d - ConstExpr(2) * e -
                                  max1_expr(lambda, cap) * beta,
                              cap));
    require(records,
            positivity_record("5*delta < 1/4",
                              ConstExpr(mpq_class(1, 4)) - ConstExpr(5) * d,
                              cap));
    BohrSpec spec =
        BohrSpec::make({beta, lambda * beta}, {delta, delta});
    records.push_back({"1, beta, lambda*beta independent over Q",
                       spec.independence_proved,
                       "exact (square-class elimination)"});
    if (!spec.independence_proved)
      throw ConstraintViolated("independence of {1, beta, lambda*beta}");
    return records;
  }

  if (cfg.id == "thm-empty" || cfg.id == "thm-q65") {
    ConstExpr xi = parse_constant(cfg, "xi");
    mpq_class lq = rational_constant(cfg, "L");
    if (lq.get_den() != 1 || lq < 1)
      throw ConstraintViolated("L must be a positive integer");
    records.push_back({"L positive integer", true, "exact"});
    ConstExpr rho = norm_expr(xi, cap);
    ConstExpr Dbar = ConstExpr(1) + abs_expr(lambda, cap);
    ConstExpr Lc{mpq_class(lq)};
    require(records, positivity_record("rho = ||xi|| > 0", rho, cap));
    require(records,
            positivity_record("L*||xi|| > 1 + |lambda|", Lc * rho - Dbar, cap));
    ConstExpr d{delta};
    require(records, positivity_record("delta > 0", d, cap));
    // k = 2 sequences feed the Bohr reduction.
    require(records,
            positivity_record(
                "delta < (rho - Dbar/L)/4",
                (rho - Dbar / Lc) / ConstExpr(4) - d, cap));
    return records;
  }

  throw std::invalid_argument("validate_params: no pipeline for id " + cfg.id);
}

ExperimentReport reproduce_thm_main(const ExperimentConfig& cfg) {
  Timer timer;
  ExperimentReport rep;
  std::vector<std::string> violations;
  std::vector<ConstraintRecord> records = validate_params(cfg);
  Instance inst = make_instance(cfg);
  const long cap = cfg.prec_cap;
  const mpq_class five_delta = 5 * inst.delta;

  json doc;
  doc["id"] = cfg.id;
  doc["config"] = cfg_echo(cfg);
  doc["params"] = {
      {"lambda", inst.lambda.str()},
      {"beta", inst.beta.str()},
      {"delta", inst.delta.get_str()},
      {"eta", inst.eta.get_str()},
      {"spec", inst.spec.to_string()},
      {"independence",
       inst.spec.independence_proved ? "certified" : "unproved"}};
  doc["constraints"] = constraints_json(records);
  json clauses;

  // (e) empirical density of E against (2*delta)^2.
  doc["density"] = density_section(inst, cfg.density_horizon, mpq_class(1, 10),
                                   cfg.set_path, violations);
  clauses["e"] = doc["density"]["ok"].get<bool>() ? "pass" : "fail";

  // The return table and S.
  ReturnTable table = return_table(inst.spec, inst.us, cfg.n_lo, cfg.n_hi,
                                   cfg.witness_bound, TableMode::TorusFirst);
  if (!cfg.table_path.empty()) {
    std::ofstream os(cfg.table_path);
    if (!os) throw std::runtime_error("cannot write " + cfg.table_path);
    table.dump_jsonl(os);
  }
  TruncatedSet S = table.intersection();
  doc["return_sets"] = table_section(table, S);

  // (c) nonempty with witness-confirmed elements.
  unsigned long confirmed = 0;
  {
    BohrScanner sc(inst.spec);
    json conf = json::array();
    for (size_t i = 0; i < S.elems.size() && confirmed < 5 && i < 25; ++i) {
      const unsigned long n = S.elems[i];
      auto w1 = sc.find_pair(inst.us[0](n), cfg.witness_bound);
      auto w2 = sc.find_pair(inst.us[1](n), cfg.witness_bound);
      if (w1 && w2) {
        ++confirmed;
        conf.push_back({{"n", n}, {"m1", *w1}, {"m2", *w2}});
      }
    }
    doc["return_sets"]["confirmed_witnesses"] = std::move(conf);
  }
  if (S.elems.empty()) {
    violations.push_back("clause c: S empty on range");
    clauses["c"] = "fail";
  } else if (confirmed < 5) {
    violations.push_back("clause c: only " + std::to_string(confirmed) +
                         " witness-confirmed elements");
    clauses["c"] = "fail";
  } else {
    clauses["c"] = "pass";
  }

  // The syndetic component B bounds the gaps inside the piecewise window.
  BohrSpec bspec = BohrSpec::make({inst.beta, inst.lambda * inst.beta},
                                  {inst.eta, inst.eta});
  if (!S.elems.empty()) {
    TruncatedSet bset = enumerate_with_density(bspec, cfg.n_hi);
    unsigned long gap_b =
        bset.elems.size() < 2 ? 1 : run_gap_profile(bset).max_gap;
    doc["largeness"] = largeness_json(S, gap_b);
  } else {
    doc["largeness"] = {{"empty", true}};
  }

  // Non-thickness certificate, then (b) max run of S <= h.
  auto cert = find_nonthick_h(inst.beta, inst.P, five_delta, 1 << 14, cap);
  if (!cert) {
    violations.push_back("clause b: no non-thickness h below cap");
    clauses["b"] = "fail";
  } else {
    json cj = cert->to_json();
    cj["recheck"] = cert->recheck(cap);
    cj["max_run_bound"] = cert->max_run_bound();
    doc["certificates"]["nonthick"] = std::move(cj);
    if (S.elems.empty()) {
      clauses["b"] = "pass";  // vacuous on an empty range
    } else {
      unsigned long max_run = run_gap_profile(S).max_run_len;
      bool run_ok = max_run <= cert->h;
      clauses["b"] = run_ok ? "pass" : "fail";
      if (!run_ok)
        violations.push_back("clause b: max run " + std::to_string(max_run) +
                             " exceeds h=" + std::to_string(cert->h));
    }
  }

  // (a) S inside {n : ||beta*n|| < 5*delta}.
  std::vector<unsigned long> bad =
      verify_inclusion(table, inst.beta, inst.P, five_delta, cap);
  clauses["a"] = bad.empty() ? "pass" : "fail";
  if (!bad.empty())
    violations.push_back("clause a: " + std::to_string(bad.size()) +
                         " elements violate the 5*delta inclusion");

  // (d) every found element of B cap T lies in S.
  {
    std::vector<ConstExpr> cs = {inst.beta, inst.lambda * inst.beta,
                                 inst.lambda * inst.lambda * inst.beta};
    std::vector<std::pair<mpq_class, mpz_class>> surds;
    for (const ConstExpr& c : cs) {
      std::optional<std::pair<mpq_class, mpz_class>> s;
      if (c.form()) s = c.form()->as_single_surd();
      if (!s) throw AssertionFailed("B cap T frequency not a single surd");
      surds.push_back(*s);
    }
    std::vector<unsigned long> bt;
    BohrScanner sb(bspec);
    sb.scan(cfg.scan_cap, [&](unsigned long n) {
      mpz_class n3 = mpz_class(n) * n * n;
      for (const auto& [q, r] : surds)
        if (norm_surd_compare(q, r * n3, inst.eta, cap) != Cmp::Below) return;
      bt.push_back(n);
    });
    json dj;
    dj["scan_cap"] = cfg.scan_cap;
    dj["found"] = bt.size();
    json sample = json::array();
    for (size_t i = 0; i < bt.size() && i < 20; ++i) sample.push_back(bt[i]);
    dj["first"] = std::move(sample);
    unsigned long in_s = 0;
    BohrScanner sc(inst.spec);
    for (size_t i = 0; i < bt.size(); ++i) {
      const unsigned long n = bt[i];
      bool member = true;
      for (const IterateSeq& u : inst.us)
        member = member &&
                 return_diff_test(inst.spec, u(n), cap) == DiffStatus::CertIn;
      if (member && i < 3) {
        // Spot-confirm certified membership with explicit pairs.
        member = sc.find_pair(inst.us[0](n), cfg.witness_bound).has_value() &&
                 sc.find_pair(inst.us[1](n), cfg.witness_bound).has_value();
      }
      if (member && n >= cfg.n_lo && n <= cfg.n_hi &&
          !std::binary_search(S.elems.begin(), S.elems.end(), n))
        member = false;  // must agree with the table on shared range
      if (member)
        ++in_s;
      else
        violations.push_back("clause d: B cap T element " +
                             std::to_string(n) + " not certified in S");
    }
    dj["in_s"] = in_s;
    if (bt.size() >= 3) {
      clauses["d"] = in_s == bt.size() ? "pass" : "fail";
    } else {
      std::string detail;
      bool fb = synthetic_certin_check(cfg.seed, 1000, detail);
      dj["fallback"] = detail;
      clauses["d"] = fb ? "inconclusive-fallback-passed" : "fail";
      if (!fb) violations.push_back("clause d fallback: " + detail);
    }
    doc["certificates"]["b_cap_t"] = std::move(dj);
  }

  doc["span_check"] =
      span_subcheck(make_family("f", inst.lambda, 1, ConstExpr(0)), cfg.seed,
                    violations);
  doc["clauses"] = std::move(clauses);
  finish(doc, timer, violations, rep);
  return rep;
}

namespace {

// Shared emptiness pipeline: certificate, brute table, density, span check.
ExperimentReport emptiness_pipeline(const ExperimentConfig& cfg,
                                    json extra_sections,
                                    std::vector<std::string> violations) {
  Timer timer;
  ExperimentReport rep;
  std::vector<ConstraintRecord> records = validate_params(cfg);
  Instance inst = make_instance(cfg);
  const long cap = cfg.prec_cap;

  json doc;
  doc["id"] = cfg.id;
  doc["config"] = cfg_echo(cfg);
  doc["params"] = {{"lambda", inst.lambda.str()},
                   {"xi", inst.xi.str()},
                   {"L", inst.L.get_str()},
                   {"delta", inst.delta.get_str()},
                   {"beta", inst.beta.str()},
                   {"rho", inst.rho.str()},
                   {"Dbar", inst.Dbar.str()},
                   {"rounding",
                    inst.mode == RoundMode::Nearest ? "nearest" : "floor"},
                   {"spec", inst.spec.to_string()}};
  doc["constraints"] = constraints_json(records);

  doc["density"] = density_section(inst, cfg.density_horizon, mpq_class(1, 5),
                                   cfg.set_path, violations);

  // Certificate first: the table afterwards must agree with it.
  std::vector<IterateSeq> table_us = {inst.us[0], inst.us[1]};
  EmptyCert cert{inst.thetas, inst.P, inst.Dbar, inst.beta, inst.rho};
  json cj = cert.to_json();
  bool cert_valid = false;
  try {
    EmptyVerdict v = check_empty_cert(cert, table_us, 1, 1000, cap);
    cert_valid = true;
    cj["valid"] = true;
    cj["norm_bound_symbolic"] = v.norm_bound_symbolic;
    cj["deviation_max_upper"] = v.dev_max_ub.get_str();
    cj["deviation_argmax"] = v.dev_argmax.get_str();
  } catch (const CertInvalid& e) {
    cj["valid"] = false;
    cj["failing"] = e.what();
    violations.push_back(std::string("emptiness certificate invalid: ") +
                         e.what());
  }
  doc["certificates"]["empty"] = std::move(cj);

  ReturnTable table = return_table(inst.spec, table_us, cfg.n_lo, cfg.n_hi,
                                   cfg.witness_bound, TableMode::WitnessOnly);
  if (!cfg.table_path.empty()) {
    std::ofstream os(cfg.table_path);
    if (!os) throw std::runtime_error("cannot write " + cfg.table_path);
    table.dump_jsonl(os);
  }
  TruncatedSet S = table.intersection();
  doc["return_sets"] = table_section(table, S);
  if (!S.elems.empty())
    violations.push_back("intersection nonempty: n=" +
                         std::to_string(S.elems[0]) +
                         " contradicts the certificate");
  if (cert_valid && !S.elems.empty())
    violations.push_back("cross-module: VALID certificate with nonempty "
                         "finite intersection");

  // Largeness diagnostics describe E itself here (S is empty by design).
  TruncatedSet E = enumerate_with_density(inst.spec, cfg.density_horizon);
  if (E.elems.empty()) {
    doc["largeness"] = {{"empty", true}};
  } else {
    unsigned long gap_e =
        E.elems.size() < 2 ? 1 : run_gap_profile(E).max_gap;
    doc["largeness"] = largeness_json(E, gap_e);
  }

  doc["span_check"] = span_subcheck(
      make_family("g", inst.lambda, inst.L, inst.xi), cfg.seed, violations);

  for (auto& [key, value] : extra_sections.items()) doc[key] = value;
  finish(doc, timer, violations, rep);
  return rep;
}

}  // namespace

ExperimentReport reproduce_thm_empty(const ExperimentConfig& cfg) {
  return emptiness_pipeline(cfg, json::object(), {});
}

ExperimentReport reproduce_thm_q65(const ExperimentConfig& cfg) {
  validate_params(cfg);  // fail before any symbolic or scan work
  std::vector<std::string> violations;
  json extra;

  // Polynomial shadow must be exactly the nonzero integer multiples of t^2.
  Instance inst = make_instance(cfg);
  span::GenFamily fam = make_family("h", inst.lambda, inst.L, inst.xi);
  span::PolyLattice lat = span::poly_shadow(fam);
  bool shadow_ok = lat.basis.size() == 1 && lat.integral &&
                   lat.zero_excluded && lat.basis[0].degree() == 2 &&
                   lat.basis[0].c[0] == 0 && lat.basis[0].c[1] == 0 &&
                   abs(lat.basis[0].c[2]) == 1;
  if (!shadow_ok) violations.push_back("shadow: expected exactly {c*t^2}");
  span::PolyLattice sub =
      span::poly_shadow(make_family("g", inst.lambda, inst.L, inst.xi));
  if (!sub.basis.empty())
    violations.push_back("shadow: (h1,h2) alone should shadow no polynomial");
  extra["shadow"] = {{"basis_size", lat.basis.size()},
                     {"integral", lat.integral},
                     {"zero_excluded", lat.zero_excluded},
                     {"subfamily_empty", sub.basis.empty()}};

  // Joint intersectivity of {t^2} for m <= 100; n = m is an explicit witness.
  span::IntersectiveReport ir =
      span::joint_intersective_check({QPoly({0, 0, 1})}, 100);
  bool witness_nm = true;
  for (unsigned long m = 1; m <= 100; ++m)
    witness_nm = witness_nm && (mpz_class(m) * m) % m == 0;
  if (!ir.all_pass || !witness_nm)
    violations.push_back("joint intersectivity failed below modulus 100");
  extra["intersective"] = {{"checked_max", ir.checked_max},
                           {"all_pass", ir.all_pass},
                           {"witness_n_equals_m", witness_nm}};

  // Nearest rounding of t^2 is the identity on integers.
  bool u3_exact = true;
  for (unsigned long n = 1; n <= 1000 && u3_exact; ++n)
    u3_exact = inst.us[2](n) == mpz_class(n) * n;
  if (!u3_exact) violations.push_back("u3 = nearest(n^2) mismatch");
  extra["u3_identity_checked"] = 1000;

  return emptiness_pipeline(cfg, std::move(extra), std::move(violations));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  try {
    if (cfg.id == "thm-main")
      rep = reproduce_thm_main(cfg);
    else if (cfg.id == "thm-empty")
      rep = reproduce_thm_empty(cfg);
    else if (cfg.id == "thm-q65")
      rep = reproduce_thm_q65(cfg);
    else
      throw std::invalid_argument("run_experiment: no pipeline for id " +
                                  cfg.id);
  } catch (const PrecisionExhausted& e) {
    rep.doc = {{"id", cfg.id},
               {"inconclusive", e.what()},
               {"timestamp", {{"generated", now_rfc3339()}}}};
    rep.exit_code = 2;
  }
  write_outputs(cfg, rep);
  return rep;
}

}  // namespace rlab
