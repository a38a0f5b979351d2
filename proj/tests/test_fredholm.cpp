#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "isinglab/errors.hpp"
#include "isinglab/formfactor.hpp"
#include "isinglab/fredholm.hpp"

using namespace isinglab;

namespace {

SpectralPoint sp2() { return SpectralPoint(cplx(2.0, 0.0)); }

} // namespace

TEST_CASE("determinant helper on hand-checked matrices") {
  // I + A = [[2, 1], [0, 3]] -> 6
  std::vector<cplx> a = {cplx(1, 0), cplx(1, 0), cplx(0, 0), cplx(2, 0)};
  cplx d = det_one_plus(a, 2);
  CHECK(std::abs(d - cplx(6.0, 0.0)) < 1e-14);

  // I + A = [[0, 1], [1, 0]]: forces a row exchange, det = -1
  std::vector<cplx> b = {cplx(-1, 0), cplx(1, 0), cplx(1, 0), cplx(-1, 0)};
  d = det_one_plus(b, 2);
  CHECK(std::abs(d - cplx(-1.0, 0.0)) < 1e-14);

  // complex 2x2: I + A = [[1+i, 2], [3, 1-i]] -> (1+i)(1-i) - 6 = -4
  std::vector<cplx> c = {cplx(0, 1), cplx(2, 0), cplx(3, 0), cplx(0, -1)};
  d = det_one_plus(c, 2);
  CHECK(std::abs(d - cplx(-4.0, 0.0)) < 1e-13);

  // singular: I + A has a zero row
  std::vector<cplx> s = {cplx(-1, 0), cplx(0, 0), cplx(0, 0), cplx(4, 0)};
  CHECK_THROWS_AS(det_one_plus(s, 2), IllConditioned);
}

TEST_CASE("zero separation recovers unit spin norm") {
  auto c = fredholm_correlation(0, 0, sp2(), 64);
  CHECK(std::abs(c.value - cplx(1.0, 0.0)) < 1e-8);
  CHECK(c.method == "fredholm");
  CHECK(c.err_est < 1e-8);
}

TEST_CASE("large separation collapses the determinant to one") {
  auto sp = sp2();
  cplx msq = magnetization(sp) * magnetization(sp);
  auto c = fredholm_correlation(40, 40, sp, 64);
  CHECK(std::abs(c.value - msq) < 1e-10 * std::abs(msq));
}

TEST_CASE("cross-method agreement with the truncated expansion") {
  auto sp = sp2();
  auto ff = correlation_ff(1, 1, sp, 2, 64);
  auto fr = fredholm_correlation(1, 1, sp, 64);
  double tol = std::max(1e-6, ff.err_est);
  CHECK(std::abs(fr.value - ff.value) < tol);
}

TEST_CASE("node-count convergence is geometric") {
  // Closer to criticality the gap shrinks and more nodes are needed, so
  // three refinement steps are all resolvable above the noise floor.
  SpectralPoint sp(cplx(1.15, 0.0));
  auto v32 = fredholm_correlation(1, 1, sp, 32).value;
  auto v64 = fredholm_correlation(1, 1, sp, 64).value;
  auto v128 = fredholm_correlation(1, 1, sp, 128).value;
  auto v256 = fredholm_correlation(1, 1, sp, 256).value;
  double d1 = std::abs(v64 - v32);
  double d2 = std::abs(v128 - v64);
  double d3 = std::abs(v256 - v128);
  CHECK(d2 < 0.5 * d1);
  CHECK(d3 < 0.5 * d2);

  SpectralPoint mild(cplx(1.5, 0.0));
  double e1 = std::abs(fredholm_correlation(1, 1, mild, 64).value -
                       fredholm_correlation(1, 1, mild, 32).value);
  double e2 = std::abs(fredholm_correlation(1, 1, mild, 128).value -
                       fredholm_correlation(1, 1, mild, 64).value);
  CHECK(e2 < 0.5 * e1 + 1e-15);
}

TEST_CASE("determinant approaches one monotonically along the diagonal") {
  auto sp = sp2();
  cplx msq = magnetization(sp) * magnetization(sp);
  double prev = 1.0;
  for (int d : {2, 4, 6, 8}) {
    auto c = fredholm_correlation(d, d, sp, 64);
    double gap = std::abs(c.value / msq - cplx(1.0, 0.0));
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev > 1e-14); // chain stays above the noise floor
}

TEST_CASE("even in the sign of M") {
  auto sp = sp2();
  auto plus = fredholm_correlation(5, 3, sp, 64);
  auto minus = fredholm_correlation(-5, 3, sp, 64);
  CHECK(std::abs(plus.value - minus.value) < 1e-10);
}

TEST_CASE("system assembly invariants") {
  auto sys = nystrom_build(2, 3, sp2(), 48);
  CHECK(sys.m == 48);
  for (double w : sys.weight) {
    CHECK(w > 0.0);
    CHECK(std::isfinite(w));
  }
  for (const cplx& v : sys.matrix) {
    CHECK(std::isfinite(v.real()));
    CHECK(std::isfinite(v.imag()));
  }
  // the kernel vanishes at coincident angles
  for (int i = 0; i < 48; ++i)
    CHECK(std::abs(sys.matrix[static_cast<std::size_t>(i) * 48 + i]) == 0.0);
}

TEST_CASE("near-critical coupling is refused") {
  SpectralPoint sp(cplx(1.0000001, 0.0));
  CHECK_THROWS_AS(fredholm_correlation(0, 0, sp, 64), NearCriticality);
}

TEST_CASE("argument validation") {
  auto sp = sp2();
  CHECK_THROWS_AS(fredholm_correlation(0, 0, SpectralPoint(cplx(2.0, 0.5)), 64),
                  ValidationError);
  CHECK_THROWS_AS(fredholm_correlation(0, 0, SpectralPoint(cplx(-2.0, 0.0)), 64),
                  ValidationError);
  CHECK_THROWS_AS(fredholm_correlation(0, -1, sp, 64), ValidationError);
  CHECK_THROWS_AS(fredholm_correlation(0, 0, sp, 16), ValidationError);
  CHECK_THROWS_AS(fredholm_correlation(0, 0, sp, 33), ValidationError);
}
