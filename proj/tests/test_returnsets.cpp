#include <doctest.h>

#include <sstream>

#include "rlab/errors.hpp"
#include "rlab/experiments.hpp"
#include "rlab/returnsets.hpp"

using namespace rlab;

namespace {

// The emptiness instance with default constants.
Instance empty_inst() {
  return make_instance(ExperimentConfig::defaults("thm-empty"));
}

}  // namespace

TEST_SUITE("returnsets") {

TEST_CASE("torus-first table on the pair spec") {
  Instance inst = make_instance(ExperimentConfig::defaults("thm-main"));
  ReturnTable t = return_table(inst.spec, inst.us, 1, 24, 200000,
                               TableMode::TorusFirst);
  CHECK(t.n_lo == 1);
  CHECK(t.n_hi == 24);
  CHECK(t.seq_names == std::vector<std::string>{"u1", "u2"});
  REQUIRE(t.rows.size() == 24);
  for (unsigned long n = 1; n <= 24; ++n) {
    const auto& row = t.rows[n - 1];
    REQUIRE(row.size() == 2);
    // u1(n) = floor(n^(3/2)), u2(n) = floor(sqrt(2) n^(3/2)) + n.
    mpz_class n3 = mpz_class(n) * n * n;
    CHECK(row[0].r == isqrt(n3));
    CHECK(row[1].r == isqrt(2 * n3) + n);
  }
  // Every difference up to n = 20 clears both 2-delta windows, so the
  // fully independent irrational spec certifies them without witnesses;
  // from n = 21 on, ||lambda beta u2(n)|| crosses 2 delta and certifies out.
  for (unsigned long n = 1; n <= 20; ++n)
    for (const RetCell& cell : t.rows[n - 1])
      CHECK(cell.status == RetStatus::InByTorus);
  for (unsigned long n = 21; n <= 24; ++n) {
    CHECK(t.rows[n - 1][0].status == RetStatus::InByTorus);
    CHECK(t.rows[n - 1][1].status == RetStatus::CertOut);
  }
  TruncatedSet s = t.intersection();
  CHECK(s.elems == std::vector<unsigned long>{1,  2,  3,  4,  5,  6,  7,
                                              8,  9,  10, 11, 12, 13, 14,
                                              15, 16, 17, 18, 19, 20});
  CHECK(s.horizon == 24);
}

TEST_CASE("witness-only mode produces checkable witnesses") {
  Instance inst = make_instance(ExperimentConfig::defaults("thm-main"));
  ReturnTable t = return_table(inst.spec, inst.us, 2, 4, 1000000,
                               TableMode::WitnessOnly);
  for (const auto& row : t.rows)
    for (const RetCell& cell : row) {
      // Differences <= 15 barely move the windows, so m = 1 pairs with all
      // of them.
      CHECK(cell.status == RetStatus::InWithWitness);
      REQUIRE(cell.witness.has_value());
      CHECK(*cell.witness == 1);
      mpz_class m(*cell.witness);
      CHECK(member(inst.spec, m));
      CHECK(member(inst.spec, m + cell.r));
    }
}

TEST_CASE("emptiness table has no certified-in cells") {
  Instance inst = empty_inst();
  ReturnTable t = return_table(inst.spec, inst.us, 1, 100, 1000000,
                               TableMode::TorusFirst);
  // For these constants every difference in rows 1..100 is certified out,
  // either by the residue filter mod 6 or by the 2-delta window.
  for (const auto& row : t.rows)
    for (const RetCell& cell : row) CHECK(cell.status == RetStatus::CertOut);
  CHECK(t.intersection().elems.empty());
}

TEST_CASE("jsonl dump carries one row per n") {
  Instance inst = make_instance(ExperimentConfig::defaults("thm-main"));
  ReturnTable t =
      return_table(inst.spec, inst.us, 3, 7, 100000, TableMode::TorusFirst);
  std::stringstream buf;
  t.dump_jsonl(buf);
  std::string line;
  unsigned long n = 3;
  while (std::getline(buf, line)) {
    auto j = nlohmann::json::parse(line);
    CHECK(j.at("n") == n);
    CHECK(j.at("r").size() == 2);
    CHECK(j.at("status").size() == 2);
    ++n;
  }
  CHECK(n == 8);
}

TEST_CASE("intersect requires matching horizons") {
  TruncatedSet a{{1, 2, 3}, 10, "a"};
  TruncatedSet b{{2, 3, 4}, 10, "b"};
  TruncatedSet c = intersect({a, b});
  CHECK(c.elems == std::vector<unsigned long>{2, 3});
  CHECK(c.horizon == 10);
  TruncatedSet d{{1}, 20, "d"};
  CHECK_THROWS_AS(intersect({a, d}), HorizonMismatch);
  CHECK_THROWS_AS(intersect({}), std::invalid_argument);
}

TEST_CASE("negative differences are rejected") {
  // A decreasing "sequence" drives u(n) - u(base) negative.
  Instance inst = empty_inst();
  IterateSeq bad{HardyCombo({{ConstExpr(-1), mpq_class(1)}}), RoundMode::Floor,
                 "bad"};
  CHECK_THROWS_AS(
      return_table(inst.spec, {bad}, 1, 3, 100, TableMode::TorusFirst),
      DomainError);
}

}  // TEST_SUITE
