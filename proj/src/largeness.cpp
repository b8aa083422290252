#include "rlab/largeness.hpp"

#include "rlab/errors.hpp"

namespace rlab {

LargenessReport run_gap_profile(const TruncatedSet& s) {
  if (s.elems.empty()) throw EmptySet("run_gap_profile: empty set");
  LargenessReport rep;
  unsigned long run_start = s.elems[0];
  unsigned long run_len = 1;
  rep.max_run_len = 1;
  rep.max_run_start = run_start;
  for (std::size_t i = 1; i < s.elems.size(); ++i) {
    unsigned long gap = s.elems[i] - s.elems[i - 1];
    ++rep.gap_histogram[gap];
    if (gap > rep.max_gap) {
      rep.max_gap = gap;
      rep.max_gap_at = s.elems[i - 1];
    }
    if (gap == 1) {
      ++run_len;
    } else {
      run_start = s.elems[i];
      run_len = 1;
    }
    if (run_len > rep.max_run_len) {
      rep.max_run_len = run_len;
      rep.max_run_start = run_start;
    }
  }
  return rep;
}

PwsWindow pws_profile(const TruncatedSet& s, unsigned long g) {
  if (s.elems.empty()) throw EmptySet("pws_profile: empty set");
  if (g == 0) throw std::invalid_argument("pws_profile: g must be positive");
  PwsWindow best{s.elems[0], s.elems[0], 1};
  unsigned long start = s.elems[0];
  unsigned long count = 1;
  for (std::size_t i = 1; i < s.elems.size(); ++i) {
    if (s.elems[i] - s.elems[i - 1] <= g) {
      ++count;
    } else {
      start = s.elems[i];
      count = 1;
    }
    unsigned long len = s.elems[i] - start + 1;
    if (len > best.length() ||
        (len == best.length() && count > best.count)) {
      best = PwsWindow{start, s.elems[i], count};
    }
  }
  return best;
}

}  // namespace rlab
