#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isinglab/chi.hpp"
#include "isinglab/errors.hpp"
#include "isinglab/rng.hpp"

using namespace isinglab;

namespace {

SpectralPoint sp2() { return SpectralPoint(cplx(2.0, 0.0)); }

ContourGrid grid2(int m, double safety = 0.5) {
  return select_radius(sp2(), safety, m);
}

} // namespace

TEST_CASE("order-2 term: factorized engine matches the generic tensor walk") {
  auto sp = sp2();
  for (int m : {16, 24}) {
    auto g = grid2(m);
    auto fast = chi_n(2, sp, g);
    cplx ref = chi_n_walk(2, sp, g);
    // Same nodes and weights, different summation association: only
    // rounding separates them.
    CHECK(std::abs(fast.value - ref) < 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("order-2 term at s=2: real, r-independent, m-refinable") {
  auto sp = sp2();
  auto g96 = grid2(96);
  auto t96 = chi_n(2, sp, g96);

  // Physical realness on the real s axis.
  CHECK(std::abs(t96.value.imag()) < 1e-9 * (1.0 + std::abs(t96.value.real())));

  // Two certified radii agree within combined error estimates.
  auto g_alt = grid2(96, 0.35);
  CHECK(g_alt.r != g96.r);
  auto t_alt = chi_n(2, sp, g_alt);
  CHECK(std::abs(t96.value - t_alt.value) <
        1e-10 + 3.0 * (t96.err_est + t_alt.err_est));

  // Grid refinement changes the value below 1e-8.
  auto t192 = chi_n(2, sp, g96.resampled(192));
  CHECK(std::abs(t192.value - t96.value) < 1e-8);

  // err_est is the m vs m/2 difference by construction.
  auto t48 = chi_n(2, sp, g96.resampled(48));
  CHECK(std::abs(t96.value - t48.value) == doctest::Approx(t96.err_est).epsilon(1e-10));
}

TEST_CASE("reduced order-2 evaluator agrees with the 4-fold one at high m") {
  auto sp = sp2();
  auto g = grid2(96);
  auto full = chi_n(2, sp, g);
  auto red = chi2_reduced(sp, g);
  CHECK(std::abs(full.value - red.value) < 1e-10 * (1.0 + std::abs(full.value)));
  CHECK(std::abs(red.value.imag()) < 1e-10);
}

TEST_CASE("pair-factor renderings differ by a global sign that cancels") {
  // (x_j - x_k)/(x_j x_k - 1) versus (x_j - x_k)/(1 - x_j x_k), both
  // families: products agree because the per-pair signs square away.
  SplitMix64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + 2 * static_cast<int>(rng.below(2)); // 2 or 4
    std::vector<cplx> x, y;
    for (int j = 0; j < n; ++j) {
      x.push_back(rng.on_circle(0.7));
      y.push_back(rng.on_circle(0.7));
    }
    cplx a(1, 0), b(1, 0);
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        a *= (x[j] - x[k]) / (x[j] * x[k] - 1.0) * (y[j] - y[k]) /
             (y[j] * y[k] - 1.0);
        b *= (x[j] - x[k]) / (1.0 - x[j] * x[k]) * (y[j] - y[k]) /
             (1.0 - y[j] * y[k]);
      }
    CHECK(std::abs(a - b) < 1e-13 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("integrand permutation symmetry at random points") {
  auto sp = sp2();
  SplitMix64 rng(43);
  auto integrand = [&](const std::vector<cplx>& x, const std::vector<cplx>& y) {
    int n = static_cast<int>(x.size());
    cplx X(1, 0), Y(1, 0), P(1, 0), G(1, 0);
    for (int j = 0; j < n; ++j) {
      X *= x[j];
      Y *= y[j];
      G *= 1.0 / bigD(x[j], y[j], sp);
    }
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        P *= (x[j] - x[k]) * (y[j] - y[k]) /
             ((1.0 - x[j] * x[k]) * (1.0 - y[j] * y[k]));
    return (1.0 / X + 1.0 / Y) / ((1.0 - X) * (1.0 - Y)) * P * G;
  };
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<cplx> x, y;
    for (int j = 0; j < 3; ++j) {
      x.push_back(rng.on_circle(0.8));
      y.push_back(rng.on_circle(0.8));
    }
    cplx base = integrand(x, y);
    // Apply the same 3-cycle to both families.
    std::vector<cplx> xr = {x[1], x[2], x[0]}, yr = {y[1], y[2], y[0]};
    CHECK(std::abs(base - integrand(xr, yr)) < 1e-12 * (1.0 + std::abs(base)));
  }
}

TEST_CASE("order-4 term: budget gate and a small smoke run") {
  auto sp = sp2();
  CHECK_THROWS_AS(chi_n(4, sp, grid2(16)), BudgetExceeded);

  auto t = chi_n(4, sp, grid2(8), 0, 1ull << 36);
  CHECK(t.n == 4);
  CHECK(std::abs(t.value) < 1.0); // higher-order terms are small
}

TEST_CASE("susceptibility assembly") {
  auto sp = sp2();
  auto g = grid2(64);

  auto s0 = susceptibility(sp, 0, g);
  cplx msq = magnetization(sp) * magnetization(sp);
  CHECK(std::abs(s0.value - (1.0 - msq)) < 1e-15);
  CHECK(s0.terms.empty());

  auto s1 = susceptibility(sp, 1, g);
  REQUIRE(s1.terms.size() == 1);
  cplx reassembled = 1.0 - msq + 2.0 * msq * s1.terms[0].value;
  CHECK(s1.value == reassembled); // exact assembly from its own terms
  CHECK(s1.terms[0].n == 2);

  // chi^(2) decays as s grows.
  auto g10 = select_radius(SpectralPoint(cplx(10, 0)), 0.5, 64);
  auto g100 = select_radius(SpectralPoint(cplx(100, 0)), 0.5, 64);
  auto c10 = chi_n(2, SpectralPoint(cplx(10, 0)), g10);
  auto c100 = chi_n(2, SpectralPoint(cplx(100, 0)), g100);
  CHECK(std::abs(c100.value) < std::abs(c10.value));
  CHECK(std::abs(c10.value) < std::abs(chi_n(2, sp, g).value));
}

TEST_CASE("per-lattice-point integral: generic engine consistency") {
  auto sp = sp2();
  auto g = grid2(24);
  for (auto [M, N] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{2, 3}}) {
    cplx fast = corr_integral(M, N, sp, 1, g);
    cplx ref = corr_walk(2, M, N, sp, g);
    CHECK(std::abs(fast - ref) < 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("residue-reduced q=1 integral matches a direct theta quadrature") {
  auto sp = sp2();
  auto g = grid2(128);
  cplx v = corr_contour_sum(1, 0, 3, sp, g);

  // Independent 1D oracle: (1/2pi) int e^{-3 gamma(e^{i t})}/sinh gamma dt
  // by periodic trapezoid on 512 points.
  int mt = 512;
  cplx acc(0, 0);
  for (int i = 0; i < mt; ++i) {
    double th = two_pi * i / mt;
    cplx gm = gamma_of(std::polar(1.0, th), sp);
    acc += std::exp(-3.0 * gm) / std::sinh(gm);
  }
  acc /= static_cast<double>(mt);
  CHECK(std::abs(v - acc) < 1e-8 * (1.0 + std::abs(acc)));
}

TEST_CASE("lattice decay of the per-point integral") {
  auto sp = sp2();
  auto g = grid2(64);
  cplx v00 = corr_integral(0, 0, sp, 1, g);
  cplx v20 = corr_integral(20, 20, sp, 1, g);
  CHECK(std::abs(v20) < std::exp(-15.0) * std::abs(v00));
}

TEST_CASE("residue identity on the certified contour") {
  auto sp = sp2();
  auto g = grid2(256);

  // x=1, N=0: the right side is 1/sinh(arccosh(3/2)) = 2/sqrt(5).
  double resid = residue_identity_check(cplx(1, 0), 0, sp, g);
  CHECK(resid < 1e-10);
  cplx direct = 1.0 / std::sinh(gamma_of(cplx(1, 0), sp));
  CHECK(std::abs(direct - cplx(0.8944271909999159, 0.0)) < 1e-15);

  // 16 sample points on C_r, N up to 5.
  for (int i = 0; i < 16; ++i) {
    cplx x = g.nodes[static_cast<std::size_t>(i * g.m / 16)];
    for (int N = 0; N <= 5; ++N)
      CHECK(residue_identity_check(x, N, sp, g) < 1e-10);
  }
}

TEST_CASE("residue identity at complex s") {
  SpectralPoint sp(cplx(2.0, 1.0));
  auto g = select_radius(sp, 0.5, 256);
  for (int i = 0; i < 8; ++i) {
    cplx x = g.nodes[static_cast<std::size_t>(i * g.m / 8)];
    for (int N = 0; N <= 3; ++N)
      CHECK(residue_identity_check(x, N, sp, g) < 1e-8);
  }
}

TEST_CASE("lattice sum equals the replaced-factor integral") {
  auto sp = sp2();
  auto g = grid2(64);
  auto res = lattice_sum_check(sp, 1, 20, g);
  CHECK(res.residual_rel < 1e-6);

  // Window stability: enlarging W changes the sum below the tail bound.
  auto res15 = lattice_sum_check(sp, 1, 15, g);
  CHECK(std::abs(res.lhs - res15.lhs) < 1e-10);

  // Faster decay at s=3.
  SpectralPoint sp3(cplx(3.0, 0.0));
  auto g3 = select_radius(sp3, 0.5, 64);
  CHECK(lattice_sum_check(sp3, 1, 12, g3).residual_rel < 1e-6);
}

TEST_CASE("validation of chi inputs") {
  auto sp = sp2();
  auto uncert = ContourGrid::uncertified(0.6, 32);
  CHECK_THROWS_AS(chi_n(2, sp, uncert), InvalidGrid);
  CHECK_THROWS_AS(chi_n(3, sp, grid2(16)), ValidationError);
  CHECK_THROWS_AS(corr_integral(-1, 0, sp, 1, grid2(16)), ValidationError);
  CHECK_THROWS_AS(lattice_sum_check(SpectralPoint(cplx(2.0, 0.5)), 1, 5,
                                    grid2(16)),
                  ValidationError);
}
