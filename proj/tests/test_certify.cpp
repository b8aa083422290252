#include <doctest.h>

#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "rlab/certify.hpp"
#include "rlab/errors.hpp"
#include "rlab/experiments.hpp"

using namespace rlab;

namespace {

CPoly line() { return CPoly({ConstExpr(0), ConstExpr(1)}); }

}  // namespace

TEST_SUITE("certify") {

TEST_CASE("find_nonthick_h minimal witnesses") {
  // ||sqrt(2) * 1|| ~ 0.414 > 2 * (1/8).
  auto c1 = find_nonthick_h(parse_const_expr("sqrt(2)"), line(),
                            mpq_class(1, 8), 100);
  REQUIRE(c1.has_value());
  CHECK(c1->h == 1);
  CHECK(c1->max_run_bound() == 1);
  CHECK(c1->recheck());

  // Degree 2: ||2 sqrt(2) h^2|| first exceeds 1/4 at h = 2.
  CPoly sqr({ConstExpr(0), ConstExpr(0), ConstExpr(1)});
  auto c2 = find_nonthick_h(parse_const_expr("sqrt(2)"), sqr,
                            mpq_class(1, 16), 100);
  REQUIRE(c2.has_value());
  CHECK(c2->h == 2);
  CHECK(c2->max_run_bound() == 4);
  CHECK(c2->recheck());

  // Small slope: first h with ||sqrt(2) h / 1000|| > 1/4 is 177.
  auto slow = find_nonthick_h(parse_const_expr("sqrt(2)/1000"), line(),
                              mpq_class(1, 8), 100);
  CHECK(!slow.has_value());
  auto found = find_nonthick_h(parse_const_expr("sqrt(2)/1000"), line(),
                               mpq_class(1, 8), 200);
  REQUIRE(found.has_value());
  CHECK(found->h == 177);
}

TEST_CASE("pair-experiment certificate lands at h = 1109") {
  auto cert = find_nonthick_h(parse_const_expr("sqrt(3)/4096"), line(),
                              mpq_class(15, 64), 1 << 14);
  REQUIRE(cert.has_value());
  CHECK(cert->h == 1109);
  CHECK(cert->max_run_bound() == 1109);
  CHECK(cert->recheck());
  // ||beta * 1109|| ~ 0.468956.
  CHECK(Dyadic::cmp_mpq(cert->norm_enclosure.lo(), mpq_class(4689, 10000)) >
        0);
  CHECK(Dyadic::cmp_mpq(cert->norm_enclosure.hi(), mpq_class(4690, 10000)) <
        0);
}

TEST_CASE("find_nonthick_h argument validation") {
  CHECK_THROWS_AS(find_nonthick_h(parse_const_expr("sqrt(2)"), line(),
                                  mpq_class(3, 8), 10),
                  std::invalid_argument);  // eta >= 2^-(d+1)
  CHECK_THROWS_AS(find_nonthick_h(parse_const_expr("sqrt(2)"), line(),
                                  mpq_class(0), 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(find_nonthick_h(parse_const_expr("3/2"), line(),
                                  mpq_class(1, 8), 10),
                  std::invalid_argument);  // rational slope
  CHECK_THROWS_AS(
      find_nonthick_h(parse_const_expr("sqrt(2)"), CPoly({ConstExpr(1)}),
                      mpq_class(1, 8), 10),
      std::invalid_argument);  // degree 0
}

TEST_CASE("certificate json round trip") {
  auto cert = find_nonthick_h(parse_const_expr("sqrt(2)"), line(),
                              mpq_class(1, 8), 100);
  REQUIRE(cert.has_value());
  NonThickCert back = NonThickCert::from_json(cert->to_json());
  CHECK(back.h == cert->h);
  CHECK(back.eta == cert->eta);
  CHECK(back.recheck());
  CHECK(back.norm_enclosure.lo() == cert->norm_enclosure.lo());
  // Tampering with h below the minimum breaks the recheck.
  back.h = 0;
  CHECK(!back.recheck());
  nlohmann::json wrong = cert->to_json();
  wrong["type"] = "empty";
  CHECK_THROWS_AS(NonThickCert::from_json(wrong), ParseError);
}

TEST_CASE("finite difference identity") {
  // Degree-2 example: 25 - 2*128 + ... at N=5, h=3 telescopes to 2! * 3^2.
  CHECK(finite_difference_check(QPoly({0, 0, 1}), 5, 3));
  CHECK(finite_difference_check(QPoly({0, 1}), 7, 4));
  std::mt19937_64 rng(31);
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + int(rng() % 5);
    std::vector<mpq_class> c;
    for (int k = 0; k < d; ++k)
      c.emplace_back(long(rng() % 41) - 20, long(rng() % 7) + 1);
    c.emplace_back(long(rng() % 40) + 1, long(rng() % 7) + 1);  // a_d != 0
    for (auto& q : c) q.canonicalize();
    mpz_class N(long(rng() % 2001) - 1000);
    mpz_class h(long(rng() % 50) + 1);
    CHECK(finite_difference_check(QPoly(c), N, h));
  }
  CHECK_THROWS_AS(finite_difference_check(QPoly(std::vector<mpq_class>{}), 1, 1),
                  std::invalid_argument);
}

TEST_CASE("verify_inclusion on a clean table and a planted violation") {
  Instance inst = make_instance(ExperimentConfig::defaults("thm-main"));
  ReturnTable t = return_table(inst.spec, inst.us, 1, 20, 100000,
                               TableMode::TorusFirst);
  CHECK(verify_inclusion(t, inst.beta, inst.P, mpq_class(15, 64)).empty());

  // ||beta n|| crosses 15/64 between n = 554 and n = 555.
  ReturnTable planted;
  planted.spec_str = inst.spec.to_string();
  planted.n_lo = 553;
  planted.n_hi = 556;
  planted.witness_bound = 0;
  planted.seq_names = {"u1"};
  for (int k = 0; k < 4; ++k) {
    RetCell cell;
    cell.status = RetStatus::InByTorus;
    cell.r = 1;
    planted.rows.push_back({cell});
  }
  std::vector<unsigned long> bad =
      verify_inclusion(planted, inst.beta, inst.P, mpq_class(15, 64));
  CHECK(bad == std::vector<unsigned long>{555, 556});
}

TEST_CASE("emptiness certificate validates for L = 6 and fails for L = 5") {
  Instance inst = make_instance(ExperimentConfig::defaults("thm-empty"));
  EmptyCert ok{inst.thetas, inst.P, inst.Dbar, inst.beta, inst.rho};
  std::vector<IterateSeq> us = {inst.us[0], inst.us[1]};
  EmptyVerdict v = check_empty_cert(ok, us, 1, 60);
  CHECK(v.norm_bound_symbolic);
  // Deviation stays strictly below 1 + sqrt(2) ~ 2.414.
  CHECK(v.dev_max_ub < mpq_class(5, 2));
  CHECK(v.dev_max_ub > 0);

  // L = 5 pushes beta * Dbar = (1 + sqrt(2))/5 ~ 0.483 past rho ~ 0.414.
  ConstExpr rt2 = parse_const_expr("sqrt(2)");
  EmptyCert bad{inst.thetas,
                CPoly({ConstExpr(5) * rt2, ConstExpr(5)}),
                inst.Dbar,
                ConstExpr(mpq_class(1, 5)),
                inst.rho};
  bool threw = false;
  try {
    check_empty_cert(bad, us, 1, 10);
  } catch (const CertInvalid& e) {
    threw = true;
    CHECK(std::string(e.what()).find("beta*Dbar < rho") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("emptiness certificate with nearest rounding") {
  Instance inst = make_instance(ExperimentConfig::defaults("thm-q65"));
  EmptyCert cert{inst.thetas, inst.P, inst.Dbar, inst.beta, inst.rho};
  std::vector<IterateSeq> us = {inst.us[0], inst.us[1]};
  CHECK(us[0].mode == RoundMode::Nearest);
  EmptyVerdict v = check_empty_cert(cert, us, 1, 60);
  CHECK(v.norm_bound_symbolic);
  // Nearest rounding halves the deviation: below (1 + sqrt(2))/2 + slack.
  CHECK(v.dev_max_ub < mpq_class(3, 2));
}

TEST_CASE("emptiness certificate input validation") {
  Instance inst = make_instance(ExperimentConfig::defaults("thm-empty"));
  EmptyCert cert{inst.thetas, inst.P, inst.Dbar, inst.beta, inst.rho};
  std::vector<IterateSeq> us = {inst.us[0], inst.us[1]};
  CHECK_THROWS_AS(check_empty_cert(cert, {inst.us[0]}, 1, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(check_empty_cert(cert, us, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(check_empty_cert(cert, us, 5, 4), std::invalid_argument);

  EmptyCert back = EmptyCert::from_json(cert.to_json());
  CHECK(back.thetas.size() == 2);
  CHECK(sign_exact(back.Dbar - cert.Dbar, 128) == 0);
  CHECK(sign_exact(back.rho - cert.rho, 128) == 0);
  check_empty_cert(back, us, 1, 10);  // still valid after the round trip
}

TEST_CASE("find_thick_interval") {
  // c = 0: every n qualifies, so the very first candidate works.
  CHECK(find_thick_interval({ConstExpr(0)}, mpq_class(3, 10), 10, 100) == 1);

  // c = 1/100: first verified 11-element interval starts at 4357.
  auto N = find_thick_interval({parse_const_expr("1/100")}, mpq_class(3, 10),
                               10, 1000000);
  REQUIRE(N.has_value());
  CHECK(*N == 4357);
  for (unsigned long m = *N; m <= *N + 10; ++m) {
    mpz_class m3 = mpz_class(m) * m * m;
    CHECK(norm_surd_compare(mpq_class(1, 100), m3, mpq_class(3, 10), 1024) ==
          Cmp::Below);
  }

  // Caps below the candidate (or below the Taylor prefilter start) are
  // honest misses.
  CHECK(!find_thick_interval({parse_const_expr("1/100")}, mpq_class(3, 10),
                             10, 4000)
             .has_value());
  CHECK(!find_thick_interval({parse_const_expr("1/100")}, mpq_class(3, 10),
                             10, 10)
             .has_value());

  CHECK_THROWS_AS(find_thick_interval({}, mpq_class(1, 4), 5, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      find_thick_interval({ConstExpr(0)}, mpq_class(0), 5, 10),
      std::invalid_argument);
  CHECK_THROWS_AS(
      find_thick_interval({ConstExpr(0)}, mpq_class(1, 4), 0, 10),
      std::invalid_argument);
}

TEST_CASE("weyl_sum diagnostic") {
  CHECK(weyl_sum(ConstExpr(0), mpq_class(3, 2), 1000) ==
        doctest::Approx(1.0).epsilon(1e-12));
  double w32 = weyl_sum(parse_const_expr("sqrt(2)"), mpq_class(3, 2), 10000);
  CHECK(w32 > 0.045);
  CHECK(w32 < 0.046);
  double w12 = weyl_sum(parse_const_expr("sqrt(2)"), mpq_class(1, 2), 10000);
  CHECK(w12 > 0.002);
  CHECK(w12 < 0.003);
  CHECK_THROWS_AS(weyl_sum(ConstExpr(0), mpq_class(2, 3), 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(weyl_sum(ConstExpr(0), mpq_class(3, 2), 0),
                  std::invalid_argument);
}

}  // TEST_SUITE
