#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace isinglab {

struct IdentityReport {
  std::string name;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tol = 0.0;

  bool ok() const { return max_residual < tol; }
};

// Randomized self-consistency battery over the analytic backbone:
//   - gamma(z) = gamma(1/z) on a branch-point-free annulus
//   - y D(x,y) = -1/2 (y - e^{-gamma(x)})(y - e^{gamma(x)})
//   - the two closed forms of h agree away from their small denominators
//   - D is symmetric under argument swap and under x -> 1/x, y -> 1/y
//   - det h over 4 angles equals prod_{j<k} h^2; over 3 angles it vanishes
//   - the y-contour of y^{N-1}/D collapses to e^{-N gamma(x)} / sinh gamma(x),
//     pinned at x=1, N=0 where the value is 2/sqrt(5) for s=2
// The pointwise families draw `trials` samples at each of s = 2, 3/2, 3+i/2;
// the determinant families use 100 four- and three-angle tuples at s = 2 and
// the residue family 16 contour points x N = 0..5.  Single-threaded and
// bit-reproducible for a fixed seed.
std::vector<IdentityReport> identity_battery(std::size_t trials = 1000,
                                             std::uint64_t seed = 42);

} // namespace isinglab
