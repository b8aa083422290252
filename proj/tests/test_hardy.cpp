#include <doctest.h>

#include <random>

#include "rlab/hardy.hpp"

using namespace rlab;

namespace {

HardyCombo combo32(const ConstExpr& lead) {
  return HardyCombo({{lead, mpq_class(3, 2)}});
}

}  // namespace

TEST_SUITE("hardy") {

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(HardyCombo({{ConstExpr(1), mpq_class(1, 3)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HardyCombo({{ConstExpr(1), mpq_class(-1)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      HardyCombo({{ConstExpr(1), mpq_class(1)}, {ConstExpr(2), mpq_class(1)}}),
      std::invalid_argument);
  CHECK(combo32(ConstExpr(1)).top_exponent() == mpq_class(3, 2));
  CHECK(HardyCombo({{ConstExpr(0), mpq_class(2)}, {ConstExpr(1), mpq_class(1)}})
            .top_exponent() == 1);
}

TEST_CASE("floor iterates match integer square roots") {
  IterateSeq u1{combo32(ConstExpr(1)), RoundMode::Floor, "u1"};
  IterateSeq u2{HardyCombo({{parse_const_expr("sqrt(2)"), mpq_class(3, 2)},
                            {ConstExpr(1), mpq_class(1)}}),
                RoundMode::Floor, "u2"};
  std::mt19937_64 rng(21);
  for (int i = 0; i < 40; ++i) {
    mpz_class n(rng() % 1000000 + 1);
    mpz_class n3 = n * n * n;
    CHECK(u1(n) == isqrt(n3));
    CHECK(u2(n) == isqrt(2 * n3) + n);
  }
  CHECK(u1(4) == 8);    // 4^(3/2) = 8 exactly
  CHECK(u1(5) == 11);   // 5^(3/2) ~ 11.18
  CHECK(u2(1) == 2);    // sqrt(2) + 1 ~ 2.41
}

TEST_CASE("shifted combo and nearest rounding") {
  // g(t) = sqrt(2) t^(3/2) + 6 (t + sqrt(2)) expanded into terms.
  ConstExpr rt2 = parse_const_expr("sqrt(2)");
  HardyCombo g({{rt2, mpq_class(3, 2)},
                {ConstExpr(6), mpq_class(1)},
                {ConstExpr(6) * rt2, mpq_class(0)}});
  IterateSeq gf{g, RoundMode::Floor, "g"};
  IterateSeq gn{g, RoundMode::Nearest, "g"};
  // g(1) = 6 + 7 sqrt(2) ~ 15.8995
  CHECK(gf(1) == 15);
  CHECK(gn(1) == 16);
  IterateSeq sq{HardyCombo({{ConstExpr(1), mpq_class(2)}}), RoundMode::Nearest,
                "h3"};
  CHECK(sq(7) == 49);
}

TEST_CASE("parity deviation has exact profile") {
  // u(n) = floor(n/2), theta = 2, P = t: the deviation is -(n mod 2).
  IterateSeq half{HardyCombo({{ConstExpr(mpq_class(1, 2)), mpq_class(1)}}),
                  RoundMode::Floor, "half"};
  CPoly P({ConstExpr(0), ConstExpr(1)});
  DeviationReport r =
      combo_deviation({half}, {ConstExpr(2)}, P, 1, 20, 64);
  CHECK(r.max_abs.contains_mpq(mpq_class(1)));
  CHECK(r.max_abs.width().is_zero());
  CHECK(r.argmax % 2 == 1);
}

TEST_CASE("three-term deviation stays below the structural bound") {
  // theta = (-sqrt(2), 1) against P(t) = 6 t + 6 sqrt(2):
  // D(n) = sqrt(2) {n^(3/2)} - {sqrt(2) n^(3/2) + 6 sqrt(2)},
  // so |D| < 1 + sqrt(2).
  ConstExpr rt2 = parse_const_expr("sqrt(2)");
  IterateSeq u1{combo32(ConstExpr(1)), RoundMode::Floor, "u1"};
  IterateSeq u2{HardyCombo({{rt2, mpq_class(3, 2)},
                            {ConstExpr(6), mpq_class(1)},
                            {ConstExpr(6) * rt2, mpq_class(0)}}),
                RoundMode::Floor, "u2"};
  CPoly P({ConstExpr(6) * rt2, ConstExpr(6)});
  DeviationReport r =
      combo_deviation({u1, u2}, {-rt2, ConstExpr(1)}, P, 1, 400, 96);
  CHECK(Dyadic::cmp_mpq(r.max_abs.hi(), mpq_class(1) + mpq_class(3, 2)) < 0);
  CHECK(r.max_abs.lo().sign() >= 0);
  CHECK(r.argmax >= 1);
  CHECK(r.argmax <= 400);
}

TEST_CASE("range and size validation") {
  IterateSeq u{combo32(ConstExpr(1)), RoundMode::Floor, "u"};
  CHECK_THROWS_AS(combo_deviation({u}, {}, CPoly({ConstExpr(0)}), 1, 2, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      combo_deviation({u}, {ConstExpr(1)}, CPoly({ConstExpr(0)}), 5, 2, 64),
      std::invalid_argument);
  CHECK_THROWS_AS(u(0), std::invalid_argument);
}

}  // TEST_SUITE
