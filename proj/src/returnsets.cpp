#include "rlab/returnsets.hpp"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "rlab/errors.hpp"

namespace rlab {

std::string to_string(RetStatus s) {
  switch (s) {
    case RetStatus::InWithWitness: return "InWithWitness";
    case RetStatus::InByTorus: return "InByTorus";
    case RetStatus::NotFoundUpTo: return "NotFoundUpTo";
    case RetStatus::CertOut: return "CertOut";
  }
  throw AssertionFailed("unknown RetStatus");
}

TruncatedSet ReturnTable::intersection() const {
  TruncatedSet out;
  out.horizon = n_hi;
  out.provenance = "return-intersection " + spec_str;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    bool all_in = true;
    for (const RetCell& c : rows[k]) {
      if (c.status != RetStatus::InWithWitness &&
          c.status != RetStatus::InByTorus) {
        all_in = false;
        break;
      }
    }
    if (all_in) out.elems.push_back(n_lo + static_cast<unsigned long>(k));
  }
  return out;
}

void ReturnTable::dump_jsonl(std::ostream& os) const {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    nlohmann::json line;
    line["n"] = n_lo + static_cast<unsigned long>(k);
    auto rs = nlohmann::json::array();
    auto st = nlohmann::json::array();
    auto wit = nlohmann::json::array();
    auto bd = nlohmann::json::array();
    for (const RetCell& c : rows[k]) {
      rs.push_back(c.r.get_str());
      st.push_back(to_string(c.status));
      if (c.witness)
        wit.push_back(*c.witness);
      else
        wit.push_back(nullptr);
      bd.push_back(c.bound);
    }
    line["r"] = std::move(rs);
    line["status"] = std::move(st);
    line["witness"] = std::move(wit);
    line["bound"] = std::move(bd);
    os << line.dump() << '\n';
  }
}

ReturnTable return_table(const BohrSpec& spec,
                         const std::vector<IterateSeq>& us,
                         unsigned long n_lo, unsigned long n_hi,
                         unsigned long witness_bound, TableMode mode) {
  if (us.empty()) throw std::invalid_argument("return_table: no sequences");
  if (n_lo < 1 || n_lo > n_hi)
    throw std::invalid_argument("return_table: bad row range");

  ReturnTable t;
  t.spec_str = spec.to_string();
  t.n_lo = n_lo;
  t.n_hi = n_hi;
  t.witness_bound = witness_bound;
  for (const IterateSeq& u : us) t.seq_names.push_back(u.name);

  BohrScanner scanner(spec);
  t.rows.reserve(n_hi - n_lo + 1);
  for (unsigned long n = n_lo; n <= n_hi; ++n) {
    std::vector<RetCell> row;
    row.reserve(us.size());
    for (const IterateSeq& u : us) {
      RetCell cell;
      cell.r = u(n);
      if (cell.r < 0)
        throw DomainError("return_table: negative difference at n=" +
                          std::to_string(n));
      DiffStatus dt = return_diff_test(spec, cell.r);
      if (dt == DiffStatus::CertOut) {
        cell.status = RetStatus::CertOut;
      } else if (dt == DiffStatus::CertIn && mode == TableMode::TorusFirst) {
        cell.status = RetStatus::InByTorus;
      } else {
        std::optional<unsigned long> w = scanner.find_pair(cell.r, witness_bound);
        if (w) {
          cell.status = RetStatus::InWithWitness;
          cell.witness = *w;
        } else {
          cell.status = RetStatus::NotFoundUpTo;
          cell.bound = witness_bound;
        }
      }
      row.push_back(std::move(cell));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

TruncatedSet intersect(const std::vector<TruncatedSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("intersect: no sets");
  for (const TruncatedSet& s : sets)
    if (s.horizon != sets[0].horizon)
      throw HorizonMismatch("intersect: horizons " +
                            std::to_string(sets[0].horizon) + " vs " +
                            std::to_string(s.horizon));
  std::vector<unsigned long> acc = sets[0].elems;
  for (std::size_t i = 1; i < sets.size(); ++i) {
    std::vector<unsigned long> next;
    std::set_intersection(acc.begin(), acc.end(), sets[i].elems.begin(),
                          sets[i].elems.end(), std::back_inserter(next));
    acc = std::move(next);
  }
  TruncatedSet out;
  out.horizon = sets[0].horizon;
  out.elems = std::move(acc);
  out.provenance = "intersection";
  return out;
}

}  // namespace rlab
