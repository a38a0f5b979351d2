#include "isinglab/spectral.hpp"

#include <cmath>

namespace isinglab {

GammaValue gamma_value(cplx z, const SpectralPoint& sp) {
  if (z == cplx(0.0, 0.0)) throw ValidationError("gamma_value: z must be nonzero");
  cplx w = sp.s_plus_inv() - 0.5 * (z + 1.0 / z);
  // arccosh with factor-wise principal square roots; continuous across the
  // real segment w < 1 in the way the annulus continuation needs.
  cplx g = std::log(w + std::sqrt(w - 1.0) * std::sqrt(w + 1.0));
  GammaValue out;
  if (g.real() < 0.0) {
    g = -g;
    out.branch_flipped = true;
  }
  out.value = g;
  // Re g == 0 leaves the sign convention with nothing to grip; report both
  // candidates via the degenerate flag.
  out.degenerate = std::abs(g.real()) <= 1e-14 * (1.0 + std::abs(g.imag()));
  return out;
}

cplx bigD(cplx x, cplx y, const SpectralPoint& sp) {
  if (x == cplx(0.0, 0.0) || y == cplx(0.0, 0.0))
    throw ValidationError("bigD: x and y must be nonzero");
  return sp.s_plus_inv() - 0.5 * (x + 1.0 / x) - 0.5 * (y + 1.0 / y);
}

cplx magnetization(const SpectralPoint& sp) {
  cplx k = sp.k();
  return std::pow(1.0 - k * k, 0.125);
}

cplx hker_pre(double theta1, cplx g1, double theta2, cplx g2) {
  double sd = std::sin(0.5 * (theta1 + theta2));
  if (std::abs(sd) >= hker_switch_threshold)
    return std::sinh(0.5 * (g1 - g2)) / sd;
  return std::sin(0.5 * (theta1 - theta2)) / std::sinh(0.5 * (g1 + g2));
}

cplx hker(double theta1, double theta2, const SpectralPoint& sp) {
  cplx g1 = gamma_of(std::polar(1.0, theta1), sp);
  cplx g2 = gamma_of(std::polar(1.0, theta2), sp);
  return hker_pre(theta1, g1, theta2, g2);
}

} // namespace isinglab
