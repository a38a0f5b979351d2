#include "isinglab/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isinglab/errors.hpp"
#include "isinglab/parallel.hpp"

namespace isinglab {

NystromSystem nystrom_build(int M, int N, const SpectralPoint& sp, int m,
                            int threads) {
  NystromSystem sys;
  sys.m = m;
  std::size_t mm = static_cast<std::size_t>(m);
  sys.theta.resize(mm);
  sys.gam.resize(mm);
  sys.weight.resize(mm);
  double sr = sp.s.real();
  for (std::size_t i = 0; i < mm; ++i) {
    double th = -pi + two_pi * static_cast<double>(i) / m;
    sys.theta[i] = th;
    double g = std::acosh(sr + 1.0 / sr - std::cos(th));
    sys.gam[i] = cplx(g, 0.0);
    double sh = std::sinh(g);
    if (sh < 1e-6)
      throw NearCriticality(
          "fredholm: min sinh gamma " + std::to_string(sh) +
          " below 1e-6; the spectral gap has closed at this coupling");
    sys.weight[i] = 1.0 / (static_cast<double>(m) * sh);
  }
  sys.matrix.resize(mm * mm);
  parallel_index(mm, threads, [&](std::size_t i) {
    cplx phase = std::exp(cplx(0.0, M * sys.theta[i]) -
                          static_cast<double>(N) * sys.gam[i]);
    for (std::size_t j = 0; j < mm; ++j) {
      cplx h = hker_pre(sys.theta[i], sys.gam[i], sys.theta[j], sys.gam[j]);
      sys.matrix[i * mm + j] = phase * h * sys.weight[j];
    }
  });
  return sys;
}

cplx det_one_plus(std::vector<cplx> a, int m) {
  std::size_t mm = static_cast<std::size_t>(m);
  for (std::size_t i = 0; i < mm; ++i) a[i * mm + i] += 1.0;
  double logmag = 0.0;
  double phase = 0.0;
  for (std::size_t c = 0; c < mm; ++c) {
    std::size_t p = c;
    double best = std::abs(a[c * mm + c]);
    for (std::size_t r = c + 1; r < mm; ++r) {
      double v = std::abs(a[r * mm + c]);
      if (v > best) {
        best = v;
        p = r;
      }
    }
    if (best < 1e-13)
      throw IllConditioned("determinant pivot below 1e-13 at matrix size " +
                           std::to_string(m));
    if (p != c) {
      std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(c * mm),
                       a.begin() + static_cast<std::ptrdiff_t>((c + 1) * mm),
                       a.begin() + static_cast<std::ptrdiff_t>(p * mm));
      phase += pi;  // row exchange flips the determinant's sign
    }
    cplx piv = a[c * mm + c];
    logmag += std::log(std::abs(piv));
    phase += std::arg(piv);
    for (std::size_t r = c + 1; r < mm; ++r) {
      cplx f = a[r * mm + c] / piv;
      if (f == cplx(0.0, 0.0)) continue;
      for (std::size_t k = c + 1; k < mm; ++k)
        a[r * mm + k] -= f * a[c * mm + k];
    }
  }
  return std::exp(logmag) * cplx(std::cos(phase), std::sin(phase));
}

CorrelationResult fredholm_correlation(int M, int N, const SpectralPoint& sp,
                                       int m, int threads) {
  if (sp.s.imag() != 0.0 || sp.s.real() <= 1.0)
    throw ValidationError("fredholm: restricted to real s > 1");
  if (N < 0) throw ValidationError("fredholm: N must be >= 0");
  if (m < 32 || m % 2 != 0)
    throw ValidationError("fredholm: m must be even and >= 32");
  NystromSystem fine = nystrom_build(M, N, sp, m, threads);
  cplx det_f = det_one_plus(fine.matrix, m);
  NystromSystem half = nystrom_build(M, N, sp, m / 2, threads);
  cplx det_h = det_one_plus(half.matrix, m / 2);
  cplx msq = magnetization(sp);
  msq *= msq;
  CorrelationResult out;
  out.M = M;
  out.N = N;
  out.method = "fredholm";
  out.value = msq * det_f;
  out.err_est = std::abs(msq) * std::abs(det_f - det_h);
  return out;
}

} // namespace isinglab
