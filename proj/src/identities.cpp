#include "isinglab/identities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "isinglab/chi.hpp"
#include "isinglab/contour.hpp"
#include "isinglab/rng.hpp"
#include "isinglab/spectral.hpp"
#include "isinglab/types.hpp"

namespace isinglab {

namespace {

// The three battery parameter points: two real, one off-axis.
std::array<SpectralPoint, 3> battery_points() {
  return {SpectralPoint(cplx(2.0, 0.0)), SpectralPoint(cplx(1.5, 0.0)),
          SpectralPoint(cplx(3.0, 0.5))};
}

// Annulus 0.7 <= |z| <= 1/0.7 stays clear of the branch points of gamma for
// every battery point (nearest lie at |z| ~ 0.566 and 1.767 for s = 3/2).
cplx draw_annulus(SplitMix64& rng) {
  double rho = rng.uniform(0.7, 1.0 / 0.7);
  return rng.on_circle(rho);
}

double rel(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Plain partial-pivot determinant for the tiny matrices used here.
cplx det_small(std::vector<cplx> a, int n) {
  cplx det(1.0, 0.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[piv * n + c], a[col * n + c]);
      det = -det;
    }
    cplx d = a[col * n + col];
    if (d == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
    det *= d;
    for (int r = col + 1; r < n; ++r) {
      cplx f = a[r * n + col] / d;
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  return det;
}

IdentityReport gamma_inversion(std::size_t trials, std::uint64_t seed) {
  IdentityReport rep{"gamma inversion symmetry", 0, 0.0, 1e-11};
  SplitMix64 rng(substream(seed, 0));
  for (const SpectralPoint& sp : battery_points()) {
    for (std::size_t t = 0; t < trials; ++t) {
      cplx z = draw_annulus(rng);
      cplx g = gamma_of(z, sp);
      rep.max_residual = std::max(rep.max_residual, rel(gamma_of(1.0 / z, sp), g));
      ++rep.samples;
    }
  }
  return rep;
}

IdentityReport quadratic_factorization(std::size_t trials, std::uint64_t seed) {
  IdentityReport rep{"quadratic factorization of y*D", 0, 0.0, 1e-11};
  SplitMix64 rng(substream(seed, 1));
  for (const SpectralPoint& sp : battery_points()) {
    for (std::size_t t = 0; t < trials; ++t) {
      cplx x = draw_annulus(rng);
      cplx y = draw_annulus(rng);
      cplx g = gamma_of(x, sp);
      cplx lhs = y * bigD(x, y, sp);
      cplx rhs = -0.5 * (y - std::exp(-g)) * (y - std::exp(g));
      rep.max_residual = std::max(rep.max_residual, rel(rhs, lhs));
      ++rep.samples;
    }
  }
  return rep;
}

IdentityReport h_dual_form(std::size_t trials, std::uint64_t seed) {
  IdentityReport rep{"h dual-form agreement", 0, 0.0, 1e-11};
  SplitMix64 rng(substream(seed, 2));
  for (const SpectralPoint& sp : battery_points()) {
    for (std::size_t t = 0; t < trials; ++t) {
      double t1 = rng.angle();
      double t2 = rng.angle();
      // Keep the sine denominator honest; the identity is checked away from
      // the removable small-denominator region the kernel switch covers.
      while (std::abs(std::sin(0.5 * (t1 + t2))) < 0.05) {
        t1 = rng.angle();
        t2 = rng.angle();
      }
      cplx g1 = gamma_of(std::polar(1.0, t1), sp);
      cplx g2 = gamma_of(std::polar(1.0, t2), sp);
      cplx f1 = std::sinh(0.5 * (g1 - g2)) / std::sin(0.5 * (t1 + t2));
      cplx f2 = std::sin(cplx(0.5 * (t1 - t2), 0.0)) / std::sinh(0.5 * (g1 + g2));
      rep.max_residual = std::max(rep.max_residual, rel(f2, f1));
      ++rep.samples;
    }
  }
  return rep;
}

IdentityReport bigd_symmetry(std::size_t trials, std::uint64_t seed) {
  IdentityReport rep{"D argument symmetries", 0, 0.0, 1e-11};
  SplitMix64 rng(substream(seed, 3));
  for (const SpectralPoint& sp : battery_points()) {
    for (std::size_t t = 0; t < trials; ++t) {
      cplx x = draw_annulus(rng);
      cplx y = draw_annulus(rng);
      cplx d0 = bigD(x, y, sp);
      double worst = rel(bigD(y, x, sp), d0);
      worst = std::max(worst, rel(bigD(1.0 / x, y, sp), d0));
      worst = std::max(worst, rel(bigD(x, 1.0 / y, sp), d0));
      rep.max_residual = std::max(rep.max_residual, worst);
      ++rep.samples;
    }
  }
  return rep;
}

// Draws an angle tuple whose pairwise kernel values all clear min_mod, so
// the product comparison stays well-conditioned.
std::vector<double> draw_tuple(SplitMix64& rng, const SpectralPoint& sp, int n,
                               double min_mod) {
  std::vector<double> th(n);
  for (;;) {
    for (double& t : th) t = rng.angle();
    double least = 1e300;
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        least = std::min(least, std::abs(hker(th[j], th[k], sp)));
    if (least >= min_mod) return th;
  }
}

IdentityReport det_even(std::uint64_t seed) {
  IdentityReport rep{"determinant product identity (4 angles)", 0, 0.0, 1e-10};
  SplitMix64 rng(substream(seed, 4));
  SpectralPoint sp(cplx(2.0, 0.0));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> th = draw_tuple(rng, sp, 4, 0.1);
    std::vector<cplx> a(16, cplx(0.0, 0.0));
    cplx prod(1.0, 0.0);
    for (int j = 0; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k) {
        cplx h = hker(th[j], th[k], sp);
        a[j * 4 + k] = h;
        a[k * 4 + j] = -h;
        prod *= h * h;
      }
    double resid = std::abs(det_small(a, 4) - prod) / std::abs(prod);
    rep.max_residual = std::max(rep.max_residual, resid);
    ++rep.samples;
  }
  return rep;
}

IdentityReport det_odd(std::uint64_t seed) {
  IdentityReport rep{"determinant vanishing (3 angles)", 0, 0.0, 1e-12};
  SplitMix64 rng(substream(seed, 5));
  SpectralPoint sp(cplx(2.0, 0.0));
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> th = draw_tuple(rng, sp, 3, 0.1);
    std::vector<cplx> a(9, cplx(0.0, 0.0));
    for (int j = 0; j < 3; ++j)
      for (int k = j + 1; k < 3; ++k) {
        cplx h = hker(th[j], th[k], sp);
        a[j * 3 + k] = h;
        a[k * 3 + j] = -h;
      }
    rep.max_residual = std::max(rep.max_residual, std::abs(det_small(a, 3)));
    ++rep.samples;
  }
  return rep;
}

IdentityReport residue_reduction() {
  IdentityReport rep{"residue reduction of the y-contour", 0, 0.0, 1e-10};
  SpectralPoint sp(cplx(2.0, 0.0));
  ContourGrid grid = select_radius(sp, 0.5, 256);
  for (int j = 0; j < 16; ++j) {
    cplx x = grid.nodes[static_cast<std::size_t>(j) * 16];
    for (int N = 0; N <= 5; ++N) {
      rep.max_residual =
          std::max(rep.max_residual, residue_identity_check(x, N, sp, grid));
      ++rep.samples;
    }
  }
  // Pinned point: at x = 1, N = 0 the closed form is 1/sinh gamma(1), which
  // for s = 2 is 2/sqrt(5).
  cplx x1(1.0, 0.0);
  rep.max_residual =
      std::max(rep.max_residual, residue_identity_check(x1, 0, sp, grid));
  double closed = 1.0 / std::sinh(gamma_of(x1, sp)).real();
  rep.max_residual =
      std::max(rep.max_residual, std::abs(closed - 2.0 / std::sqrt(5.0)));
  rep.samples += 2;
  return rep;
}

} // namespace

std::vector<IdentityReport> identity_battery(std::size_t trials,
                                             std::uint64_t seed) {
  std::vector<IdentityReport> out;
  out.push_back(gamma_inversion(trials, seed));
  out.push_back(quadratic_factorization(trials, seed));
  out.push_back(h_dual_form(trials, seed));
  out.push_back(bigd_symmetry(trials, seed));
  out.push_back(det_even(seed));
  out.push_back(det_odd(seed));
  out.push_back(residue_reduction());
  return out;
}

} // namespace isinglab
