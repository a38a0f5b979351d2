#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "isinglab/kernels.hpp"
#include "isinglab/rng.hpp"

using namespace isinglab;

namespace {

struct Data {
  std::vector<cplx> a, b, c, d;
  std::vector<double> ra, rb, rc;

  explicit Data(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    auto rz = [&] { return cplx(rng.uniform(-1, 1), rng.uniform(-1, 1)); };
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(rz());
      b.push_back(rz());
      c.push_back(rz());
      d.push_back(rz());
      ra.push_back(rng.uniform(-1, 1));
      rb.push_back(rng.uniform(-1, 1));
      rc.push_back(rng.uniform(-1, 1));
    }
  }
};

// Plain std::complex accumulation, the reference the kernels must match.
cplx naive_cc(const Data& t) {
  cplx s(0, 0);
  for (std::size_t i = 0; i < t.a.size(); ++i) s += t.a[i] * t.b[i];
  return s;
}

cplx naive_cccc(const Data& t) {
  cplx s(0, 0);
  for (std::size_t i = 0; i < t.a.size(); ++i)
    s += t.a[i] * t.b[i] * t.c[i] * t.d[i];
  return s;
}

cplx naive_chi2_row(cplx x1, cplx E1, cplx iS1, const Data& t) {
  cplx s(0, 0);
  for (std::size_t i = 0; i < t.a.size(); ++i) {
    cplx xi = t.a[i], Ei = t.b[i], iSi = t.c[i];
    cplx cx = 1.0 - x1 * xi, cE = 1.0 - E1 * Ei;
    s += (x1 - xi) * (E1 - Ei) * E1 * Ei * iS1 * iSi / (cx * cx * cE * cE);
  }
  return s;
}

void check_close(cplx got, cplx want, double tol) {
  CHECK(std::abs(got - want) <= tol * (1.0 + std::abs(want)));
}

} // namespace

TEST_CASE("kernels match naive complex arithmetic (both backends)") {
  for (std::size_t n : {std::size_t(1), std::size_t(7), std::size_t(64),
                        std::size_t(129)}) {
    Data t(n, 1000 + n);
    cplx x1(0.3, 0.2), E1(0.4, -0.1), iS1(1.1, 0.05);

    std::vector<SimdMode> modes = {SimdMode::Scalar};
    if (simd_avx2_supported()) modes.push_back(SimdMode::Avx2);

    for (SimdMode m : modes) {
      set_simd_mode(m);
      check_close(kdot_cc(t.a.data(), t.b.data(), n), naive_cc(t), 1e-13);
      {
        cplx want(0, 0);
        for (std::size_t i = 0; i < n; ++i) want += t.ra[i] * t.b[i];
        check_close(kdot_rc(t.ra.data(), t.b.data(), n), want, 1e-13);
      }
      {
        cplx want(0, 0);
        for (std::size_t i = 0; i < n; ++i)
          want += t.ra[i] * t.rb[i] * t.rc[i] * t.d[i];
        check_close(kdot_rrrc(t.ra.data(), t.rb.data(), t.rc.data(),
                              t.d.data(), n),
                    want, 1e-13);
      }
      check_close(kdot_cccc(t.a.data(), t.b.data(), t.c.data(), t.d.data(), n),
                  naive_cccc(t), 1e-13);
      check_close(chi2_pair_row(x1, E1, iS1, t.a.data(), t.b.data(),
                                t.c.data(), n),
                  naive_chi2_row(x1, E1, iS1, t), 1e-12);
    }
    set_simd_mode(SimdMode::Auto);
  }
}

TEST_CASE("scalar and avx2 backends agree closely") {
  if (!simd_avx2_supported()) {
    MESSAGE("avx2 not supported on this host; equivalence vacuous");
    return;
  }
  Data t(257, 99);
  cplx x1(0.5, -0.3), E1(0.2, 0.4), iS1(0.9, -0.2);

  set_simd_mode(SimdMode::Scalar);
  cplx s1 = kdot_cc(t.a.data(), t.b.data(), t.a.size());
  cplx s2 = kdot_cccc(t.a.data(), t.b.data(), t.c.data(), t.d.data(), t.a.size());
  cplx s3 = chi2_pair_row(x1, E1, iS1, t.a.data(), t.b.data(), t.c.data(),
                          t.a.size());
  cplx s4 = kdot_rc(t.ra.data(), t.b.data(), t.a.size());
  cplx s5 = kdot_rrrc(t.ra.data(), t.rb.data(), t.rc.data(), t.d.data(),
                      t.a.size());

  set_simd_mode(SimdMode::Avx2);
  check_close(kdot_cc(t.a.data(), t.b.data(), t.a.size()), s1, 1e-13);
  check_close(kdot_cccc(t.a.data(), t.b.data(), t.c.data(), t.d.data(),
                        t.a.size()),
              s2, 1e-13);
  check_close(chi2_pair_row(x1, E1, iS1, t.a.data(), t.b.data(), t.c.data(),
                            t.a.size()),
              s3, 1e-12);
  check_close(kdot_rc(t.ra.data(), t.b.data(), t.a.size()), s4, 1e-13);
  check_close(kdot_rrrc(t.ra.data(), t.rb.data(), t.rc.data(), t.d.data(),
                        t.a.size()),
              s5, 1e-13);

  set_simd_mode(SimdMode::Auto);
}

TEST_CASE("same backend gives bit-identical results on repeat") {
  Data t(100, 5);
  cplx r1 = kdot_cc(t.a.data(), t.b.data(), t.a.size());
  cplx r2 = kdot_cc(t.a.data(), t.b.data(), t.a.size());
  CHECK(r1.real() == r2.real());
  CHECK(r1.imag() == r2.imag());
}

TEST_CASE("simd mode control") {
  CHECK((simd_backend_name() == "scalar" || simd_backend_name() == "avx2"));
  set_simd_mode(SimdMode::Scalar);
  CHECK(simd_backend_name() == "scalar");
  set_simd_mode(SimdMode::Auto);
}
