#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "rlab/bohr.hpp"
#include "rlab/errors.hpp"

using namespace rlab;

namespace {

BohrSpec spec_rt2(const mpq_class& delta) {
  return BohrSpec::make({parse_const_expr("sqrt(2)")}, {delta});
}

// E of the pair experiment: ||beta m|| < delta, ||lambda beta m|| < delta.
BohrSpec spec_pair() {
  return BohrSpec::make({parse_const_expr("sqrt(3)/4096"),
                         parse_const_expr("sqrt(2)*sqrt(3)/4096")},
                        {mpq_class(3, 64), mpq_class(3, 64)});
}

// E of the emptiness experiment: ||sqrt(2)/6 m|| < delta, ||m/6|| < delta.
BohrSpec spec_mixed() {
  return BohrSpec::make(
      {parse_const_expr("sqrt(2)/6"), parse_const_expr("1/6")},
      {mpq_class(1, 512), mpq_class(1, 512)});
}

}  // namespace

TEST_SUITE("bohr") {

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(BohrSpec::make({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(spec_rt2(mpq_class(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(spec_rt2(mpq_class(0)), std::invalid_argument);
  CHECK_THROWS_AS(spec_rt2(mpq_class(1, 3)), std::invalid_argument);
  // Radius on the rational orbit: 2 * (1/4) * 2 = 1 is an integer.
  CHECK_THROWS_AS(
      BohrSpec::make({parse_const_expr("1/2")}, {mpq_class(1, 4)}),
      std::invalid_argument);
  BohrSpec ok = spec_rt2(mpq_class(1, 4));
  CHECK(ok.dim() == 1);
  CHECK(ok.all_irrational());
  CHECK(ok.independence_proved);

  BohrSpec mixed = spec_mixed();
  CHECK(!mixed.all_irrational());
  CHECK(mixed.independence_proved);  // the irrational block alone
  CHECK(mixed.freqs[1].rational == mpq_class(1, 6));

  // sqrt(2) and sqrt(8) = 2 sqrt(2) share a square class.
  BohrSpec dep = BohrSpec::make(
      {parse_const_expr("sqrt(2)"), parse_const_expr("sqrt(8)")},
      {mpq_class(1, 4), mpq_class(1, 4)});
  CHECK(!dep.independence_proved);
  CHECK_THROWS_AS(density_theoretical(dep), UnsupportedStructure);
}

TEST_CASE("membership oracles") {
  BohrSpec e = spec_rt2(mpq_class(1, 4));
  // ||sqrt(2) m|| < 1/4 holds for exactly {2,3,5,7,10} below 11.
  std::vector<unsigned long> want = {2, 3, 5, 7, 10};
  for (unsigned long m = 1; m <= 10; ++m)
    CHECK(member(e, mpz_class(m)) ==
          (std::find(want.begin(), want.end(), m) != want.end()));

  BohrSpec mixed = spec_mixed();
  // 2448 = 6 * 408 and ||408 sqrt(2)|| ~ 8.67e-4 < 1/512.
  CHECK(member(mixed, mpz_class(2448)));
  CHECK(!member(mixed, mpz_class(6)));     // ||sqrt(2)|| too large
  CHECK(!member(mixed, mpz_class(2447)));  // wrong residue mod 6
  CHECK(!member(mixed, mpz_class(0)));
}

TEST_CASE("scanner agrees with exact membership") {
  for (const BohrSpec& e :
       {spec_rt2(mpq_class(1, 4)), spec_mixed(), spec_pair()}) {
    TruncatedSet s = enumerate_with_density(e, 5000);
    CHECK(s.horizon == 5000);
    size_t k = 0;
    for (unsigned long m = 1; m <= 5000; ++m) {
      const bool scanned = k < s.elems.size() && s.elems[k] == m;
      if (scanned) ++k;
      CHECK(scanned == member(e, mpz_class(m)));
    }
    CHECK(k == s.elems.size());
  }
}

TEST_CASE("enumeration density approaches the closed form") {
  BohrSpec e = spec_rt2(mpq_class(1, 4));
  CHECK(density_theoretical(e).as_rational() == mpq_class(1, 2));
  TruncatedSet s = enumerate_with_density(e, 100000);
  mpq_class err = s.density_exact() - mpq_class(1, 2);
  CHECK(abs(err) < mpq_class(1, 100));

  // Purely rational: membership is a residue condition.
  BohrSpec rat = BohrSpec::make({parse_const_expr("1/3")}, {mpq_class(1, 8)});
  CHECK(density_theoretical(rat).as_rational() == mpq_class(1, 3));
  TruncatedSet rs = enumerate_with_density(rat, 3000);
  CHECK(rs.elems.size() == 1000);
  for (unsigned long m : rs.elems) CHECK(m % 3 == 0);

  CHECK(density_theoretical(spec_pair()).as_rational() == mpq_class(9, 1024));
  CHECK(density_theoretical(spec_mixed()).as_rational() ==
        mpq_class(1, 1536));
}

TEST_CASE("csv round trip") {
  TruncatedSet s = enumerate_with_density(spec_rt2(mpq_class(1, 4)), 200);
  std::stringstream buf;
  s.write_csv(buf);
  TruncatedSet back = TruncatedSet::read_csv(buf);
  CHECK(back.elems == s.elems);
  CHECK(back.horizon == s.horizon);
  CHECK(back.provenance == s.provenance);

  std::stringstream bad("1\n2\n");
  CHECK_THROWS_AS(TruncatedSet::read_csv(bad), ParseError);
  std::stringstream unsorted("# spec=x N=10\n5\n3\n");
  CHECK_THROWS_AS(TruncatedSet::read_csv(unsorted), ParseError);
  std::stringstream outside("# spec=x N=10\n11\n");
  CHECK_THROWS_AS(TruncatedSet::read_csv(outside), ParseError);
}

TEST_CASE("find_pair and witness_search") {
  BohrSpec e = spec_rt2(mpq_class(1, 4));
  BohrScanner scan(e);
  CHECK(scan.find_pair(mpz_class(1), 100) == 2);   // 2, 3
  CHECK(scan.find_pair(mpz_class(4), 100) == 3);   // 3, 7
  CHECK(scan.find_pair(mpz_class(0), 100) == 2);   // first member
  CHECK_THROWS_AS(scan.find_pair(mpz_class(-1), 10), std::invalid_argument);

  WitnessResult w = witness_search(e, mpz_class(1), 100);
  CHECK(w.m == 2);
  CHECK(w.searched_to == 100);

  // Residue filtering: in the mixed spec any difference not divisible by 6
  // admits no pair at all.
  BohrScanner ms(spec_mixed());
  CHECK(ms.modulus() == 6);
  CHECK(ms.residues() == std::vector<unsigned long>{0});
  CHECK(!ms.find_pair(mpz_class(3), 1000000).has_value());
}

TEST_CASE("return_diff_test certificates") {
  BohrSpec pair = spec_pair();
  CHECK(return_diff_test(pair, mpz_class(0)) == DiffStatus::CertIn);
  CHECK(return_diff_test(pair, mpz_class(1)) == DiffStatus::CertIn);
  // ||222 sqrt(3)/4096|| ~ 0.09388 >= 2 delta = 3/32.
  CHECK(return_diff_test(pair, mpz_class(222)) == DiffStatus::CertOut);

  BohrSpec mixed = spec_mixed();
  // ||sqrt(2)/6|| ~ 0.2357 >= 1/256.
  CHECK(return_diff_test(mixed, mpz_class(1)) == DiffStatus::CertOut);
  // Both norms small, but the rational frequency blocks a CertIn.
  CHECK(return_diff_test(mixed, mpz_class(2448)) == DiffStatus::NeedWitness);
  CHECK(return_diff_test(mixed, mpz_class(0)) == DiffStatus::NeedWitness);

  // CertOut is sound: no witness below a large bound, whether the residue
  // filter (r = 1) or the irrational window (r = 6) is the obstruction.
  BohrScanner ms(mixed);
  CHECK(!ms.find_pair(mpz_class(1), 100000).has_value());
  CHECK(!ms.find_pair(mpz_class(6), 100000).has_value());
}

TEST_CASE("scanner rejects unusably narrow windows") {
  mpz_class den = 1;
  den <<= 40;
  BohrSpec narrow = spec_rt2(mpq_class(1, den));
  CHECK_THROWS_AS(BohrScanner{narrow}, UnsupportedStructure);
}

TEST_CASE("pair spec enumeration is sparse but populated") {
  TruncatedSet s = enumerate_with_density(spec_pair(), 100000);
  // Expectation ~ 100000 * 9/1024 ~ 879.
  CHECK(s.elems.size() > 500);
  CHECK(s.elems.size() < 1400);
  for (size_t i = 0; i + 1 < s.elems.size(); ++i)
    CHECK(s.elems[i] < s.elems[i + 1]);
}

}  // TEST_SUITE
