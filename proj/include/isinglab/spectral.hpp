#pragma once

#include <array>

#include "isinglab/errors.hpp"
#include "isinglab/types.hpp"

namespace isinglab {

// Low-temperature parameter point.  All evaluations require |s| > 1, which
// the constructor enforces once so downstream code can assume it.
struct SpectralPoint {
  cplx s;

  explicit SpectralPoint(cplx s_value) : s(s_value) {
    if (std::abs(s) <= 1.0)
      throw ValidationError("SpectralPoint: |s| must exceed 1");
  }

  cplx k() const { return 1.0 / (s * s); }
  cplx s_plus_inv() const { return s + 1.0 / s; }
};

struct GammaValue {
  cplx value;
  bool branch_flipped = false; // sign negated to enforce Re >= 0
  bool degenerate = false;     // Re == 0 within tolerance: sign undetermined

  // Both candidate branches; candidates()[0] is the reported one.
  std::array<cplx, 2> candidates() const { return {value, -value}; }
};

// Inverse-cosh branch of cosh g = s + 1/s - (z + 1/z)/2 with Re g >= 0,
// continuous on annuli r <= |z| <= 1/r that avoid the branch points.
GammaValue gamma_value(cplx z, const SpectralPoint& sp);

// Convenience accessor for the common case.
inline cplx gamma_of(cplx z, const SpectralPoint& sp) {
  return gamma_value(z, sp).value;
}

// D(x,y;s) = s + 1/s - (x + 1/x)/2 - (y + 1/y)/2.
cplx bigD(cplx x, cplx y, const SpectralPoint& sp);

// Spontaneous magnetization M = (1 - k^2)^{1/8}, principal branch.
cplx magnetization(const SpectralPoint& sp);

// Kernel h(t1,t2) = sinh((g1-g2)/2) / sin((t1+t2)/2), evaluated through the
// equivalent form sin((t1-t2)/2) / sinh((g1+g2)/2) when the first
// denominator is smaller than hker_switch_threshold in modulus.
inline constexpr double hker_switch_threshold = 1e-3;

cplx hker(double theta1, double theta2, const SpectralPoint& sp);

// Same kernel with gamma values precomputed by the caller (hot loops build
// tables of gamma(e^{i theta}) once per grid).
cplx hker_pre(double theta1, cplx g1, double theta2, cplx g2);

} // namespace isinglab
