// Command-line front end: experiment pipelines, Bohr-set queries,
// certificate construction/checking, span diagnostics, Weyl sums.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rlab/certify.hpp"
#include "rlab/errors.hpp"
#include "rlab/experiments.hpp"
#include "rlab/largeness.hpp"
#include "rlab/returnsets.hpp"
#include "rlab/spanfam.hpp"

namespace {

using nlohmann::json;
using namespace rlab;

json load_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return json::parse(is);
}

ExperimentConfig load_config(const std::string& id, const std::string& path) {
  if (path.empty()) return ExperimentConfig::defaults(id);
  json j = load_json(path);
  if (!id.empty() && j.contains("id") && j.at("id") != id)
    throw std::invalid_argument("config id " + j.at("id").get<std::string>() +
                                " does not match requested " + id);
  if (!j.contains("id")) j["id"] = id;
  return ExperimentConfig::from_json(j);
}

std::vector<mpq_class> parse_rational_list(const std::string& csv) {
  std::vector<mpq_class> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto r = parse_const_expr(item).as_rational();
    if (!r) throw std::invalid_argument("not rational: " + item);
    out.push_back(*r);
  }
  return out;
}

BohrSpec spec_from_args(const std::vector<std::string>& freqs,
                        const std::vector<std::string>& radii) {
  std::vector<ConstExpr> fs;
  for (const auto& f : freqs) fs.push_back(parse_const_expr(f));
  std::vector<mpq_class> rs;
  for (const auto& r : radii) {
    auto q = parse_const_expr(r).as_rational();
    if (!q) throw std::invalid_argument("radius must be rational: " + r);
    rs.push_back(*q);
  }
  return BohrSpec::make(fs, rs);
}

span::GenFamily family_from_args(const std::string& fam,
                                 const std::string& lambda,
                                 const std::string& L,
                                 const std::string& xi) {
  mpq_class lq = *parse_const_expr(L).as_rational();
  return make_family(fam, parse_const_expr(lambda), lq.get_num(),
                     parse_const_expr(xi));
}

int cmd_exit = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohr-set return-time verification toolkit"};
  app.require_subcommand(1);

  // ---- validate
  std::string v_cfg;
  auto* validate = app.add_subcommand("validate", "certify config constraints");
  validate->add_option("config", v_cfg, "config JSON path")->required();
  validate->callback([&] {
    ExperimentConfig cfg = load_config("", v_cfg);
    for (const auto& r : validate_params(cfg))
      std::cout << (r.ok ? "ok   " : "FAIL ") << r.name << "  margin "
                << r.margin << '\n';
  });

  // ---- run
  std::string r_id, r_cfg, r_nrange, r_out, r_table, r_set;
  unsigned long r_bound = 0;
  std::uint64_t r_seed = 0;
  auto* run = app.add_subcommand("run", "reproduce an experiment end to end");
  run->add_option("id", r_id, "thm-main | thm-empty | thm-q65")->required();
  run->add_option("--config", r_cfg, "config JSON (defaults otherwise)");
  run->add_option("--nrange", r_nrange, "return-table rows A:B");
  run->add_option("--witness-bound", r_bound, "pair-search cap M");
  run->add_option("--out", r_out, "write report JSON here");
  run->add_option("--table", r_table, "write return table JSONL here");
  run->add_option("--set", r_set, "write enumerated Bohr set CSV here");
  run->add_option("--seed", r_seed, "sampling seed");
  run->callback([&] {
    ExperimentConfig cfg = load_config(r_id, r_cfg);
    if (!r_nrange.empty()) {
      auto colon = r_nrange.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("--nrange wants A:B");
      cfg.n_lo = std::stoul(r_nrange.substr(0, colon));
      cfg.n_hi = std::stoul(r_nrange.substr(colon + 1));
    }
    if (r_bound) cfg.witness_bound = r_bound;
    if (!r_out.empty()) cfg.out_path = r_out;
    if (!r_table.empty()) cfg.table_path = r_table;
    if (!r_set.empty()) cfg.set_path = r_set;
    if (r_seed) cfg.seed = r_seed;
    ExperimentReport rep = run_experiment(cfg);
    if (cfg.out_path.empty()) std::cout << rep.doc.dump(2) << '\n';
    cmd_exit = rep.exit_code;
  });

  // ---- bohr enum | density
  auto* bohr = app.add_subcommand("bohr", "Bohr-set queries");
  bohr->require_subcommand(1);
  std::vector<std::string> b_freqs, b_radii;
  unsigned long b_N = 1000;
  std::string b_out;
  auto* benum = bohr->add_subcommand("enum", "enumerate members up to N");
  benum->add_option("--freq", b_freqs, "frequency (expression)")->required();
  benum->add_option("--radius", b_radii, "radius (dyadic rational)")
      ->required();
  benum->add_option("-N,--horizon", b_N, "enumeration horizon");
  benum->add_option("--out", b_out, "write CSV here (stdout otherwise)");
  benum->callback([&] {
    TruncatedSet s =
        enumerate_with_density(spec_from_args(b_freqs, b_radii), b_N);
    if (b_out.empty()) {
      s.write_csv(std::cout);
    } else {
      std::ofstream os(b_out);
      if (!os) throw std::runtime_error("cannot write " + b_out);
      s.write_csv(os);
    }
    std::cerr << "size " << s.elems.size() << " density "
              << s.density_exact().get_str() << '\n';
  });
  auto* bdens = bohr->add_subcommand("density", "closed-form density");
  bdens->add_option("--freq", b_freqs, "frequency (expression)")->required();
  bdens->add_option("--radius", b_radii, "radius (dyadic rational)")
      ->required();
  bdens->callback([&] {
    BohrSpec spec = spec_from_args(b_freqs, b_radii);
    std::cout << density_theoretical(spec).str() << '\n';
  });

  // ---- cert nonthick | empty | thick-interval
  auto* cert = app.add_subcommand("cert", "build or check certificates");
  cert->require_subcommand(1);

  std::string c_gamma = "sqrt(3)/4096", c_poly = "0,1", c_eta = "15/64";
  unsigned long c_hmax = 1 << 14;
  std::string c_out;
  auto* nonthick = cert->add_subcommand(
      "nonthick", "minimal h with ||d! a_d gamma h^d|| > 2^d eta");
  nonthick->add_option("--gamma", c_gamma, "irrational factor (expression)");
  nonthick->add_option("--poly", c_poly, "comma coefficients, low to high");
  nonthick->add_option("--eta", c_eta, "radius (rational)");
  nonthick->add_option("--hmax", c_hmax, "search bound");
  nonthick->add_option("--out", c_out, "write certificate JSON here");
  nonthick->callback([&] {
    std::vector<ConstExpr> coeffs;
    for (const auto& q : parse_rational_list(c_poly))
      coeffs.push_back(ConstExpr(q));
    auto r = find_nonthick_h(parse_const_expr(c_gamma), CPoly(coeffs),
                             *parse_const_expr(c_eta).as_rational(), c_hmax);
    if (!r) {
      std::cout << "not found below h_max " << c_hmax << '\n';
      cmd_exit = 2;
      return;
    }
    json j = r->to_json();
    j["recheck"] = r->recheck();
    std::cout << j.dump(2) << '\n';
    if (!c_out.empty()) {
      std::ofstream os(c_out);
      if (!os) throw std::runtime_error("cannot write " + c_out);
      os << j.dump(2) << '\n';
    }
  });

  std::string e_id = "thm-empty", e_cfg, e_in;
  auto* cempty = cert->add_subcommand(
      "empty", "check the emptiness certificate of an instance");
  cempty->add_option("--id", e_id, "thm-empty | thm-q65");
  cempty->add_option("--config", e_cfg, "config JSON (defaults otherwise)");
  cempty->add_option("--in", e_in, "load certificate JSON instead of building");
  cempty->callback([&] {
    ExperimentConfig cfg = load_config(e_id, e_cfg);
    validate_params(cfg);
    Instance inst = make_instance(cfg);
    EmptyCert ec =
        e_in.empty()
            ? EmptyCert{inst.thetas, inst.P, inst.Dbar, inst.beta, inst.rho}
            : EmptyCert::from_json(load_json(e_in));
    std::vector<IterateSeq> us = {inst.us[0], inst.us[1]};
    try {
      EmptyVerdict v = check_empty_cert(ec, us, 1, 1000);
      std::cout << "VALID norm_bound="
                << (v.norm_bound_symbolic ? "symbolic" : "sampled")
                << " deviation_max<=" << v.dev_max_ub.get_str() << " near n="
                << v.dev_argmax.get_str() << '\n';
    } catch (const CertInvalid& e) {
      std::cout << "INVALID " << e.what() << '\n';
      cmd_exit = 1;
    }
  });

  std::vector<std::string> t_cs;
  std::string t_eta = "3/10";
  unsigned long t_H = 10, t_cap = 1000000;
  auto* thick = cert->add_subcommand(
      "thick-interval", "search a verified interval inside the 3/2-Bohr set");
  thick->add_option("--c", t_cs, "frequency (expression)")->required();
  thick->add_option("--eta", t_eta, "radius (rational)");
  thick->add_option("--H", t_H, "interval length (H+1 elements)");
  thick->add_option("--cap", t_cap, "search cap");
  thick->callback([&] {
    std::vector<ConstExpr> cs;
    for (const auto& c : t_cs) cs.push_back(parse_const_expr(c));
    auto N = find_thick_interval(cs, *parse_const_expr(t_eta).as_rational(),
                                 t_H, t_cap);
    if (N) {
      std::cout << "verified [" << *N << ", " << *N + t_H << "]\n";
    } else {
      std::cout << "not found below cap " << t_cap
                << " (honest outcome, not a disproof)\n";
      cmd_exit = 2;
    }
  });

  // ---- span classify | shadow | intersective
  auto* sp = app.add_subcommand("span", "derivative-span diagnostics");
  sp->require_subcommand(1);
  std::string s_fam = "f", s_lambda = "sqrt(2)", s_L = "6", s_xi = "sqrt(2)";
  std::string s_coeffs;
  auto* classify = sp->add_subcommand(
      "classify", "limit class of an integer combination of derivatives");
  classify->add_option("--family", s_fam, "f | g | h");
  classify->add_option("--lambda", s_lambda, "lambda (expression)");
  classify->add_option("--L", s_L, "L (integer, g/h families)");
  classify->add_option("--xi", s_xi, "xi (expression, g/h families)");
  classify
      ->add_option("--coeffs", s_coeffs,
                   "rows 'a0,a1,...;b0,b1,...' of derivative coefficients")
      ->required();
  classify->callback([&] {
    span::GenFamily fam = family_from_args(s_fam, s_lambda, s_L, s_xi);
    std::vector<std::vector<mpz_class>> c;
    std::stringstream rows(s_coeffs);
    std::string row;
    while (std::getline(rows, row, ';')) {
      c.emplace_back();
      std::stringstream ss(row);
      std::string item;
      while (std::getline(ss, item, ','))
        c.back().push_back(mpz_class(item));
    }
    span::Classification cl =
        span::classify_limit(span::integer_combination(fam, c));
    switch (cl.cls) {
      case span::LimitClass::ZeroFunction: std::cout << "zero function\n"; break;
      case span::LimitClass::LimitZero: std::cout << "limit 0\n"; break;
      case span::LimitClass::LimitInfinity: std::cout << "limit infinity\n"; break;
      case span::LimitClass::FiniteNonzero:
        std::cout << "finite nonzero limit\n";
        break;
    }
    std::cout << "top exponent " << cl.top_exponent.get_str() << '\n';
  });
  auto* shadow = sp->add_subcommand("shadow", "integer polynomial shadow");
  shadow->add_option("--family", s_fam, "f | g | h");
  shadow->add_option("--lambda", s_lambda, "lambda (expression)");
  shadow->add_option("--L", s_L, "L (integer)");
  shadow->add_option("--xi", s_xi, "xi (expression)");
  shadow->callback([&] {
    span::GenFamily fam = family_from_args(s_fam, s_lambda, s_L, s_xi);
    span::PolyLattice lat = span::poly_shadow(fam);
    if (lat.basis.empty()) {
      std::cout << "shadow empty\n";
      return;
    }
    for (const auto& p : lat.basis) {
      std::cout << "generator:";
      for (size_t k = 0; k < p.c.size(); ++k)
        std::cout << ' ' << p.c[k].get_str() << "*t^" << k;
      std::cout << '\n';
    }
    std::cout << "integral " << (lat.integral ? "yes" : "no")
              << ", zero excluded " << (lat.zero_excluded ? "yes" : "no")
              << '\n';
  });
  std::vector<std::string> i_polys;
  unsigned long i_max = 100;
  auto* inter = sp->add_subcommand("intersective",
                                   "joint intersectivity up to a modulus");
  inter->add_option("--poly", i_polys, "coefficients c0,c1,... (repeatable)")
      ->required();
  inter->add_option("--max", i_max, "largest modulus");
  inter->callback([&] {
    std::vector<QPoly> ps;
    for (const auto& s : i_polys) ps.push_back(QPoly(parse_rational_list(s)));
    span::IntersectiveReport r = span::joint_intersective_check(ps, i_max);
    if (r.all_pass)
      std::cout << "jointly intersective for all m <= " << r.checked_max
                << '\n';
    else {
      std::cout << "fails at m = " << r.first_fail << '\n';
      cmd_exit = 1;
    }
  });

  // ---- weyl
  std::string w_c = "sqrt(2)", w_exp = "3/2";
  unsigned long w_N = 1000000;
  auto* weyl = app.add_subcommand(
      "weyl", "exponential-sum magnitude (non-rigorous diagnostic)");
  weyl->add_option("--c", w_c, "frequency (expression)");
  weyl->add_option("--exp", w_exp, "exponent 1/2 or 3/2");
  weyl->add_option("-N,--horizon", w_N, "number of terms");
  weyl->callback([&] {
    double mag =
        weyl_sum(parse_const_expr(w_c), *parse_const_expr(w_exp).as_rational(),
                 w_N);
    std::cout << mag << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const PrecisionExhausted& e) {
    std::cerr << "inconclusive: " << e.what() << '\n';
    return 2;
  } catch (const ConstraintViolated& e) {
    std::cerr << "constraint violated: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return cmd_exit;
}
