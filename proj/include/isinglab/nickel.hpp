#pragma once
// Unit-circle singularity families indexed by order n: the admissible real
// parts are averages of the real parts of two nth roots of unity, and each
// admissible real part lifts to one or two points on the circle.

#include <string>
#include <vector>

#include "isinglab/types.hpp"

namespace isinglab {

struct NickelPoint {
  int n = 0;
  int j = 0;               // witness root indices, 0 <= j <= k < n
  int k = 0;
  double re_value = 0.0;   // (cos(2 pi j / n) + cos(2 pi k / n)) / 2
  std::vector<cplx> points; // the lift(s): re +- i sqrt(1 - re^2)
};

// All distinct admissible real parts for order n, deduplicated at 1e-12 and
// sorted by principal angle (descending real part).  Witness pairs are the
// lexicographically smallest producing each value.  include_repeats governs
// whether a root may be averaged with itself; the inclusive reading is the
// default and is what admits re = 1 at n = 1.
std::vector<NickelPoint> nickel_enumerate(int n, bool include_repeats = true);

struct NickelMatch {
  bool match = false;
  int j = 0;
  int k = 0;
  double distance = 0.0;  // |Re s0 - nearest admissible value|
};

// Distance test against order n.  s0 must sit on the unit circle to 1e-9.
NickelMatch is_nickel(cplx s0, int n, double tol);

struct DensityRow {
  int n = 0;
  int count = 0;          // total circle points at this order
  double max_gap = 0.0;   // largest angular gap between adjacent points
};

std::vector<DensityRow> density_table(const std::vector<int>& orders);

// CSV with header n,j,k,re_value,angle1,angle2; angle2 is empty for the
// two real points re = +-1.
std::string nickel_csv(const std::vector<NickelPoint>& pts);

} // namespace isinglab
