#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "isinglab/spectral.hpp"
#include "isinglab/types.hpp"

namespace isinglab {

// Equispaced nodes on the circle |z| = r.  A grid is "certified" for a
// parameter point when select_radius verified the pole-separation condition
// Re gamma(x) > ln(1/r) on its verification grid; the certificate is a
// property of (r, s), so resampling the same circle at another node count
// keeps it.
struct ContourGrid {
  double r = 0.0;
  int m = 0;
  std::vector<cplx> nodes; // r * e^{2 pi i a / m}, constructed directly
  bool certified = false;
  cplx s_certified{0.0, 0.0};
  double margin = 0.0; // min over verification grid of Re gamma - ln(1/r)

  static ContourGrid uncertified(double r, int m);

  // Same circle and certificate, different node count.
  ContourGrid resampled(int m_new) const;

  bool certified_for(const SpectralPoint& sp) const {
    return certified && s_certified == sp.s;
  }
};

inline constexpr int radius_verify_points = 512;

// Finds r < 1 with |e^{-gamma(x)}| < r < |e^{gamma(x)}| for all x on C_r:
// ln(1/r) starts at safety * (min Re gamma on |z|=1) and the gap is halved
// up to 8 times until the verification grid accepts it.
ContourGrid select_radius(const SpectralPoint& sp, double safety, int m);

// Runs the same verification on a caller-proposed radius instead of
// searching.  Throws NoValidRadius when the pole-separation condition fails
// anywhere on the verification grid.
ContourGrid certify_radius(const SpectralPoint& sp, double r, int m);

struct QuadratureResult {
  cplx value{0.0, 0.0};
  double err_est = 0.0; // |value(m) - value(m/2)|, coarse grid embedded
  int m_used = 0;
  double r_used = 0.0;
};

// Tensor-product evaluation of (1/2pi i)^d * contour integral of f over the
// product of the given circles.  The integrand receives one node per
// variable.  Node weight per variable is z_a / m.  err_est compares against
// the embedded half-resolution grid (even-indexed nodes) and requires every
// m to be even.  Accumulation uses fixed tiles and a pairwise combine so the
// result does not depend on the thread count.
QuadratureResult circle_integral(
    const std::function<cplx(std::span<const cplx>)>& f,
    const std::vector<ContourGrid>& grids, int threads = 0);

} // namespace isinglab
