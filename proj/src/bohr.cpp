#include "rlab/bohr.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "rlab/errors.hpp"

namespace rlab {

namespace {

constexpr unsigned long kReanchorBlocks = 1UL << 16;
// Accumulated fixed-point slack stays far below any realistic window; a
// spec whose windows are this narrow is rejected up front.
constexpr std::uint64_t kMaxSlack = 1UL << 24;

// Exact rational torus norm ||p/q||.
mpq_class rational_norm(const mpq_class& v) {
  mpz_class rem;
  mpz_fdiv_r(rem.get_mpz_t(), v.get_num().get_mpz_t(),
             v.get_den().get_mpz_t());
  mpq_class norm(std::min(rem, mpz_class(v.get_den() - rem)), v.get_den());
  norm.canonicalize();
  return norm;
}

// frac(x) * 2^64 with the error certified to be at most kFracSlack ulps.
constexpr std::uint64_t kFracSlack = 4;

std::uint64_t frac64(const ConstExpr& x) {
  const DyadicInterval I = eval_interval(x, 224);
  const Dyadic f = I.lo() - Dyadic(I.lo().floor(), 0);
  mpz_class a = f.mul2k(64).floor();
  mpz_class wid = I.width().mul2k(64).ceil();
  if (wid + 2 > static_cast<long>(kFracSlack))
    throw PrecisionExhausted("frac64: enclosure too wide for " + x.str());
  return mpz_get_ui(a.get_mpz_t());  // low 64 bits
}

// Q-independence of {1} u {surd values}: group radicands into square
// classes (exact pairwise tests), express each value in class coordinates
// and check full row rank over Q. The rational parts ride on the "1"
// coordinate, which is spanned by 1 itself, so independence holds iff the
// class-coordinate rows are independent.
bool certify_independence(const std::vector<const QuadForm*>& forms) {
  std::vector<mpz_class> reps;  // class representatives
  // (row, class index) -> coordinate
  std::vector<std::map<size_t, mpq_class>> rows;
  for (const QuadForm* f : forms) {
    std::map<size_t, mpq_class> row;
    for (const auto& [rad, coeff] : f->surd_terms()) {
      size_t cls = reps.size();
      mpq_class coord = coeff;
      for (size_t i = 0; i < reps.size(); ++i) {
        mpz_class prod = rad * reps[i];
        if (mpz_perfect_square_p(prod.get_mpz_t())) {
          mpz_class s;
          mpz_sqrt(s.get_mpz_t(), prod.get_mpz_t());
          cls = i;
          coord = coeff * mpq_class(s, reps[i]);
          break;
        }
      }
      if (cls == reps.size()) reps.push_back(rad);
      row[cls] += coord;
    }
    rows.push_back(std::move(row));
  }
  // Gaussian elimination over Q on the sparse rows.
  std::vector<std::map<size_t, mpq_class>> basis;
  for (auto row : rows) {
    for (const auto& b : basis) {
      if (row.empty()) break;
      const size_t lead = b.begin()->first;
      auto it = row.find(lead);
      if (it == row.end()) continue;
      const mpq_class factor = it->second / b.begin()->second;
      for (const auto& [c, v] : b) {
        row[c] -= factor * v;
        if (row[c] == 0) row.erase(c);
      }
    }
    if (row.empty()) return false;  // dependent
    basis.push_back(std::move(row));
    std::sort(basis.begin(), basis.end(),
              [](const auto& a, const auto& b) {
                return a.begin()->first < b.begin()->first;
              });
  }
  return true;
}

}  // namespace

BohrSpec BohrSpec::make(const std::vector<ConstExpr>& freqs,
                        const std::vector<mpq_class>& radii) {
  if (freqs.empty() || freqs.size() != radii.size())
    throw std::invalid_argument("BohrSpec: need matching nonempty lists");
  BohrSpec s;
  s.radii = radii;
  for (const auto& d : radii) {
    if (!(d > 0 && d < mpq_class(1, 2)))
      throw std::invalid_argument("BohrSpec: radius out of (0, 1/2): " +
                                  d.get_str());
    if (!Dyadic::mpq_is_dyadic(d))
      throw std::invalid_argument("BohrSpec: radius not dyadic: " +
                                  d.get_str());
  }
  std::vector<const QuadForm*> irr_forms;
  bool forms_complete = true;
  for (size_t i = 0; i < freqs.size(); ++i) {
    Freq f{freqs[i], std::nullopt};
    if (const auto r = freqs[i].as_rational()) {
      f.rational = *r;
      // Reject radii on the orbit {j/q}: membership/return tests would sit
      // on a boundary the strict inequalities cannot decide.
      const mpz_class& q = r->get_den();
      for (const mpq_class& t : {radii[i], mpq_class(2 * radii[i])}) {
        mpq_class tq = t * q;
        tq.canonicalize();
        if (tq.get_den() == 1)
          throw std::invalid_argument(
              "BohrSpec: radius collides with rational frequency orbit: " +
              radii[i].get_str() + " vs " + r->get_str());
      }
    } else if (freqs[i].form()) {
      irr_forms.push_back(&*freqs[i].form());
    } else {
      forms_complete = false;
    }
    s.freqs.push_back(std::move(f));
  }
  s.independence_proved =
      forms_complete &&
      (irr_forms.empty() || certify_independence(irr_forms));
  return s;
}

bool BohrSpec::all_irrational() const {
  for (const auto& f : freqs)
    if (f.rational) return false;
  return true;
}

std::string BohrSpec::to_string() const {
  std::string out = "phi=[";
  for (size_t i = 0; i < freqs.size(); ++i) {
    if (i) out += ',';
    out += freqs[i].value.str();
  }
  out += "];delta=[";
  for (size_t i = 0; i < radii.size(); ++i) {
    if (i) out += ',';
    out += radii[i].get_str();
  }
  out += ']';
  return out;
}

void TruncatedSet::write_csv(std::ostream& os) const {
  os << "# spec=" << provenance << " N=" << horizon << '\n';
  for (unsigned long e : elems) os << e << '\n';
}

TruncatedSet TruncatedSet::read_csv(std::istream& is) {
  TruncatedSet s;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# spec=", 0) != 0)
    throw ParseError("truncated-set csv: missing header");
  const auto npos = line.rfind(" N=");
  if (npos == std::string::npos)
    throw ParseError("truncated-set csv: header lacks N=");
  s.provenance = line.substr(7, npos - 7);
  s.horizon = std::stoul(line.substr(npos + 3));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const unsigned long v = std::stoul(line);
    if (!s.elems.empty() && v <= s.elems.back())
      throw ParseError("truncated-set csv: elements not increasing");
    if (v == 0 || v > s.horizon)
      throw ParseError("truncated-set csv: element outside [1, N]");
    s.elems.push_back(v);
  }
  return s;
}

bool member(const BohrSpec& spec, const mpz_class& m, long cap_bits) {
  if (m < 1) return false;
  for (size_t i = 0; i < spec.freqs.size(); ++i) {
    const auto& f = spec.freqs[i];
    if (f.rational) {
      if (rational_norm(*f.rational * m) >= spec.radii[i]) return false;
      continue;
    }
    switch (compare_torus(f.value * ConstExpr(m), spec.radii[i], cap_bits)) {
      case Cmp::Below:
        break;
      case Cmp::Above:
        return false;
      case Cmp::Unknown:
        throw PrecisionExhausted("member undecided at cap: m=" +
                                 m.get_str());
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// BohrScanner

BohrScanner::BohrScanner(BohrSpec spec) : spec_(std::move(spec)) {
  // Residue filter from the rational frequencies.
  mpz_class Q = 1;
  for (const auto& f : spec_.freqs)
    if (f.rational)
      mpz_lcm(Q.get_mpz_t(), Q.get_mpz_t(),
              f.rational->get_den().get_mpz_t());
  if (!Q.fits_ulong_p())
    throw UnsupportedStructure("rational frequency modulus too large");
  Q_ = mpz_get_ui(Q.get_mpz_t());
  for (unsigned long res = 0; res < Q_; ++res) {
    bool ok = true;
    for (size_t i = 0; i < spec_.freqs.size() && ok; ++i)
      if (spec_.freqs[i].rational)
        ok = rational_norm(*spec_.freqs[i].rational * res) < spec_.radii[i];
    if (ok) residues_.push_back(res);
  }
  // Fixed-point windows for the irrational frequencies.
  for (size_t i = 0; i < spec_.freqs.size(); ++i) {
    if (spec_.freqs[i].rational) continue;
    Irr ir;
    ir.freq = spec_.freqs[i].value;
    const mpq_class& d = spec_.radii[i];
    const long k =
        static_cast<long>(mpz_sizeinbase(d.get_den().get_mpz_t(), 2)) - 1;
    if (k > 64)
      throw UnsupportedStructure("radius denominator beyond 2^64");
    mpz_class w = d.get_num() << static_cast<unsigned long>(64 - k);
    if (!w.fits_ulong_p())
      throw UnsupportedStructure("radius window overflow");
    ir.win = mpz_get_ui(w.get_mpz_t());
    if (ir.win <= 4 * kMaxSlack)
      throw UnsupportedStructure("radius too small for the scan windows");
    ir.step = frac64(ir.freq * ConstExpr(mpz_class(Q_)));
    for (unsigned long res : residues_)
      ir.offs.push_back(frac64(ir.freq * ConstExpr(mpz_class(res))));
    irr_.push_back(std::move(ir));
  }
}

namespace {

// Distance of the approximate angle to the nearest integer, in ulps.
inline std::uint64_t wrap_dist(std::uint64_t a) {
  return std::min(a, static_cast<std::uint64_t>(0) - a);
}

enum class WinTest { In, Out, Margin };

inline WinTest window_test(std::uint64_t angle, std::uint64_t win,
                           std::uint64_t slack) {
  const std::uint64_t d = wrap_dist(angle);
  if (d + slack < win) return WinTest::In;
  if (d >= win + slack) return WinTest::Out;
  return WinTest::Margin;
}

}  // namespace

void BohrScanner::scan(
    unsigned long N, const std::function<void(unsigned long)>& fn) const {
  // Angle error budget: anchor (<= kFracSlack) plus kFracSlack per stride
  // plus the residue offset's own kFracSlack, all in ulps.
  std::vector<std::uint64_t> base(irr_.size(), 0);
  std::uint64_t slack = kFracSlack;
  unsigned long blocks_since_anchor = 0;
  for (unsigned long b0 = 0; b0 <= N; b0 += Q_) {
    if (blocks_since_anchor == kReanchorBlocks) {
      for (size_t i = 0; i < irr_.size(); ++i)
        base[i] = frac64(irr_[i].freq * ConstExpr(mpz_class(b0)));
      slack = kFracSlack;
      blocks_since_anchor = 0;
    }
    for (size_t ri = 0; ri < residues_.size(); ++ri) {
      const unsigned long m = b0 + residues_[ri];
      if (m < 1 || m > N) continue;
      bool in = true, exact = false;
      for (size_t i = 0; i < irr_.size() && in; ++i) {
        switch (window_test(base[i] + irr_[i].offs[ri], irr_[i].win,
                            slack + kFracSlack)) {
          case WinTest::In:
            break;
          case WinTest::Out:
            in = false;
            break;
          case WinTest::Margin:
            exact = true;
            in = false;
            break;
        }
      }
      if (in || (exact && member(spec_, mpz_class(m)))) fn(m);
    }
    for (size_t i = 0; i < irr_.size(); ++i) base[i] += irr_[i].step;
    slack += kFracSlack;
    ++blocks_since_anchor;
    assert(slack <= kMaxSlack);
  }
}

std::optional<unsigned long> BohrScanner::find_pair(const mpz_class& r,
                                                    unsigned long M) const {
  if (r < 0) throw std::invalid_argument("find_pair: negative difference");
  // Residues admissible for both m and m + r.
  const unsigned long r_mod =
      Q_ == 1 ? 0 : mpz_fdiv_ui(r.get_mpz_t(), Q_);
  std::vector<size_t> pair_res;
  for (size_t ri = 0; ri < residues_.size(); ++ri) {
    const unsigned long shifted = (residues_[ri] + r_mod) % Q_;
    if (std::binary_search(residues_.begin(), residues_.end(), shifted))
      pair_res.push_back(ri);
  }
  if (pair_res.empty()) return std::nullopt;
  // Angle offsets for the +r shift (one more kFracSlack in the budget).
  std::vector<std::uint64_t> rshift;
  for (const auto& ir : irr_)
    rshift.push_back(frac64(ir.freq * ConstExpr(r)));

  std::vector<std::uint64_t> base(irr_.size(), 0);
  std::uint64_t slack = kFracSlack;
  unsigned long blocks_since_anchor = 0;
  for (unsigned long b0 = 0; b0 <= M; b0 += Q_) {
    if (blocks_since_anchor == kReanchorBlocks) {
      for (size_t i = 0; i < irr_.size(); ++i)
        base[i] = frac64(irr_[i].freq * ConstExpr(mpz_class(b0)));
      slack = kFracSlack;
      blocks_since_anchor = 0;
    }
    for (size_t ri : pair_res) {
      const unsigned long m = b0 + residues_[ri];
      if (m < 1 || m > M) continue;
      bool in = true, exact = false;
      for (size_t i = 0; i < irr_.size() && in; ++i) {
        const std::uint64_t a = base[i] + irr_[i].offs[ri];
        for (const std::uint64_t angle : {a, a + rshift[i]}) {
          switch (window_test(angle, irr_[i].win, slack + 2 * kFracSlack)) {
            case WinTest::In:
              break;
            case WinTest::Out:
              in = false;
              break;
            case WinTest::Margin:
              exact = true;
              in = false;
              break;
          }
          if (!in) break;
        }
      }
      if (!in && !exact) continue;
      // Confirm candidates on the exact path (doubled cap) before reporting.
      const mpz_class mz(m);
      if (member(spec_, mz, 2 * kDefaultPrecCap) &&
          member(spec_, mz + r, 2 * kDefaultPrecCap))
        return m;
    }
    for (size_t i = 0; i < irr_.size(); ++i) base[i] += irr_[i].step;
    slack += kFracSlack;
    ++blocks_since_anchor;
    assert(slack <= kMaxSlack);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

TruncatedSet enumerate_with_density(const BohrSpec& spec, unsigned long N) {
  BohrScanner scan(spec);
  TruncatedSet s;
  s.horizon = N;
  s.provenance = spec.to_string();
  scan.scan(N, [&](unsigned long m) { s.elems.push_back(m); });
  return s;
}

ConstExpr density_theoretical(const BohrSpec& spec) {
  bool any_irr = false;
  for (const auto& f : spec.freqs) any_irr = any_irr || !f.rational;
  if (any_irr && !spec.independence_proved)
    throw UnsupportedStructure(
        "density needs certified independence of the irrational block");
  BohrScanner scan(spec);
  mpq_class density(scan.residues().size(), scan.modulus());
  for (size_t i = 0; i < spec.freqs.size(); ++i)
    if (!spec.freqs[i].rational) density *= 2 * spec.radii[i];
  density.canonicalize();
  return ConstExpr(density);
}

DiffStatus return_diff_test(const BohrSpec& spec, const mpz_class& r,
                            long cap_bits) {
  for (size_t i = 0; i < spec.freqs.size(); ++i) {
    const mpq_class two_delta = 2 * spec.radii[i];
    const auto& f = spec.freqs[i];
    if (f.rational) {
      if (rational_norm(*f.rational * r) >= two_delta)
        return DiffStatus::CertOut;
      continue;
    }
    switch (compare_torus(f.value * ConstExpr(r), two_delta, cap_bits)) {
      case Cmp::Below:
        break;
      case Cmp::Above:
        return DiffStatus::CertOut;
      case Cmp::Unknown:
        throw PrecisionExhausted("return_diff_test undecided: r=" +
                                 r.get_str());
    }
  }
  return spec.all_irrational() && spec.independence_proved
             ? DiffStatus::CertIn
             : DiffStatus::NeedWitness;
}

WitnessResult witness_search(const BohrSpec& spec, const mpz_class& r,
                             unsigned long M) {
  BohrScanner scan(spec);
  WitnessResult res;
  res.searched_to = M;
  if (auto m = scan.find_pair(r, M)) res.m = m;
  return res;
}

}  // namespace rlab
