#pragma once

#include <map>

#include "rlab/bohr.hpp"

namespace rlab {

// Consecutive-difference statistics of a nonempty truncated set. A run is a
// maximal block of consecutive integers; a gap is the difference between
// adjacent elements (so a full interval has max_gap 1 and max_run == horizon
// when it starts at 1 and ends at the horizon).
struct LargenessReport {
  unsigned long max_run_len = 0;
  unsigned long max_run_start = 0;
  unsigned long max_gap = 0;     // 0 for singletons
  unsigned long max_gap_at = 0;  // left endpoint of the widest gap
  std::map<unsigned long, unsigned long> gap_histogram;
};

LargenessReport run_gap_profile(const TruncatedSet& s);  // EmptySet if empty

// Longest window whose elements chain with gaps <= g: start/end are set
// elements, every adjacent difference inside is <= g.
struct PwsWindow {
  unsigned long start = 0, end = 0;
  unsigned long count = 0;  // elements inside
  unsigned long length() const { return end - start + 1; }
};

PwsWindow pws_profile(const TruncatedSet& s, unsigned long g);  // EmptySet

}  // namespace rlab
