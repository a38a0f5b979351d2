#include "isinglab/formfactor.hpp"

#include <cmath>

#include "isinglab/errors.hpp"
#include "isinglab/kernels.hpp"
#include "isinglab/parallel.hpp"

namespace isinglab {

namespace {

struct ThetaTables {
  int m = 0;
  std::vector<double> theta;
  std::vector<cplx> gam;
  std::vector<cplx> w;      // e^{i M t - N gamma} / (m sinh gamma)
  std::vector<double> Hr;   // [i*m+j] = h(t_i, t_j)^2, real-s path
  std::vector<cplx> Hc;     // same, complex-s path
  bool real_s = false;
};

ThetaTables build_theta(int M, int N, const SpectralPoint& sp, int m,
                        bool force_complex, int threads) {
  ThetaTables t;
  t.m = m;
  t.real_s = sp.s.imag() == 0.0 && sp.s.real() > 1.0 && !force_complex;
  std::size_t mm = static_cast<std::size_t>(m);
  t.theta.resize(mm);
  t.gam.resize(mm);
  t.w.resize(mm);
  for (std::size_t i = 0; i < mm; ++i) {
    double th = -pi + two_pi * static_cast<double>(i) / m;
    t.theta[i] = th;
    if (t.real_s) {
      // On the unit circle cosh(gamma) = s + 1/s - cos(theta) is real and
      // > 1, so gamma stays real; computing it in real arithmetic keeps the
      // weight's modulus a plain double.  The phase is built from |M| and
      // conjugated for negative M, so flipping the sign of M conjugates
      // every table entry bit-for-bit.
      double sr = sp.s.real();
      double c = sr + 1.0 / sr - std::cos(th);
      double g = std::acosh(c);
      t.gam[i] = cplx(g, 0.0);
      double mod = std::exp(-static_cast<double>(N) * g) /
                   (static_cast<double>(m) * std::sinh(g));
      double a = static_cast<double>(std::abs(M)) * th;
      cplx phase(std::cos(a), std::sin(a));
      if (M < 0) phase = std::conj(phase);
      t.w[i] = mod * phase;
    } else {
      cplx g = gamma_of(std::polar(1.0, th), sp);
      t.gam[i] = g;
      t.w[i] = std::exp(cplx(0.0, M * th) - static_cast<double>(N) * g) /
               (static_cast<double>(m) * std::sinh(g));
    }
  }
  if (t.real_s) {
    t.Hr.resize(mm * mm);
    parallel_index(mm, threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < mm; ++j) {
        cplx h = hker_pre(t.theta[i], t.gam[i], t.theta[j], t.gam[j]);
        t.Hr[i * mm + j] = (h * h).real();
      }
    });
  } else {
    t.Hc.resize(mm * mm);
    parallel_index(mm, threads, [&](std::size_t i) {
      for (std::size_t j = 0; j < mm; ++j) {
        cplx h = hker_pre(t.theta[i], t.gam[i], t.theta[j], t.gam[j]);
        t.Hc[i * mm + j] = h * h;
      }
    });
  }
  return t;
}

// Even-indexed subsets form the uniform m/2 grid; weights carry 1/m, so
// subsampled entries are rescaled by 2.
ThetaTables subsample(const ThetaTables& t) {
  ThetaTables c;
  c.m = t.m / 2;
  c.real_s = t.real_s;
  std::size_t mm = static_cast<std::size_t>(t.m);
  std::size_t mc = static_cast<std::size_t>(c.m);
  c.theta.resize(mc);
  c.gam.resize(mc);
  c.w.resize(mc);
  for (std::size_t i = 0; i < mc; ++i) {
    c.theta[i] = t.theta[2 * i];
    c.gam[i] = t.gam[2 * i];
    c.w[i] = 2.0 * t.w[2 * i];
  }
  if (t.real_s) {
    c.Hr.resize(mc * mc);
    for (std::size_t i = 0; i < mc; ++i)
      for (std::size_t j = 0; j < mc; ++j)
        c.Hr[i * mc + j] = t.Hr[2 * i * mm + 2 * j];
  } else {
    c.Hc.resize(mc * mc);
    for (std::size_t i = 0; i < mc; ++i)
      for (std::size_t j = 0; j < mc; ++j)
        c.Hc[i * mc + j] = t.Hc[2 * i * mm + 2 * j];
  }
  return c;
}

// sum_{i,j} H_ij w_i w_j / 2
cplx order1_sum(const ThetaTables& t, int threads) {
  std::size_t m = static_cast<std::size_t>(t.m);
  cplx s = reduce_tiles<cplx>(m, 16, threads, [&](std::size_t lo, std::size_t hi) {
    cplx part(0.0, 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
      cplx row = t.real_s ? kdot_rc(&t.Hr[i * m], t.w.data(), m)
                          : kdot_cc(&t.Hc[i * m], t.w.data(), m);
      part += t.w[i] * row;
    }
    return part;
  });
  return 0.5 * s;
}

// sum over 4 indices of prod_{pairs} H * prod w / 4!
cplx order2_sum(const ThetaTables& t, int threads) {
  std::size_t m = static_cast<std::size_t>(t.m);
  cplx s = reduce_tiles<cplx>(m, 2, threads, [&](std::size_t lo, std::size_t hi) {
    cplx part(0.0, 0.0);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        cplx wij;
        double hij_r = 0.0;
        cplx hij_c;
        if (t.real_s)
          hij_r = t.Hr[i * m + j];
        else
          hij_c = t.Hc[i * m + j];
        wij = t.w[i] * t.w[j];
        for (std::size_t k = 0; k < m; ++k) {
          cplx inner;
          if (t.real_s) {
            double pre = hij_r * t.Hr[i * m + k] * t.Hr[j * m + k];
            if (pre == 0.0) continue;
            inner = pre * t.w[k] *
                    kdot_rrrc(&t.Hr[i * m], &t.Hr[j * m], &t.Hr[k * m],
                              t.w.data(), m);
          } else {
            cplx pre = hij_c * t.Hc[i * m + k] * t.Hc[j * m + k];
            inner = pre * t.w[k] *
                    kdot_cccc(&t.Hc[i * m], &t.Hc[j * m], &t.Hc[k * m],
                              t.w.data(), m);
          }
          part += wij * inner;
        }
      }
    }
    return part;
  });
  return s / 24.0;
}

cplx ff_sum(const ThetaTables& t, int n, int threads) {
  return n == 1 ? order1_sum(t, threads) : order2_sum(t, threads);
}

void validate_ff_args(int N, int n, int m_nodes) {
  if (N < 0)
    throw ValidationError("formfactor_term: N must be >= 0 (use evenness)");
  if (n < 1 || n > 2)
    throw ValidationError("formfactor_term: order n must be 1 or 2");
  if (m_nodes < 8 || m_nodes % 2 != 0)
    throw ValidationError("formfactor_term: m_nodes must be even and >= 8");
}

} // namespace

FormFactorTerm formfactor_term(int M, int N, const SpectralPoint& sp, int n,
                               int m_nodes, int threads) {
  validate_ff_args(N, n, m_nodes);
  ThetaTables t = build_theta(M, N, sp, m_nodes, false, threads);
  cplx v = ff_sum(t, n, threads);
  cplx vc = ff_sum(subsample(t), n, threads);
  if (t.real_s) {
    // Exact symmetrization: the integrand pairs (t_vec, -t_vec) into
    // conjugates, so the true value is real and the imaginary part is
    // quadrature noise.
    v = cplx(v.real(), 0.0);
    vc = cplx(vc.real(), 0.0);
  }
  FormFactorTerm out;
  out.n = n;
  out.M = M;
  out.N = N;
  out.value = v;
  out.err_est = std::abs(v - vc);
  out.m_nodes = m_nodes;
  return out;
}

cplx formfactor_term_generic(int M, int N, const SpectralPoint& sp, int n,
                             int m_nodes, int threads) {
  validate_ff_args(N, n, m_nodes);
  ThetaTables t = build_theta(M, N, sp, m_nodes, true, threads);
  return ff_sum(t, n, threads);
}

CorrelationResult correlation_ff(int M, int N, const SpectralPoint& sp,
                                 int n_max, int m_nodes, int threads) {
  if (n_max < 0 || n_max > 2)
    throw ValidationError("correlation_ff: n_max must be 0, 1, or 2");
  cplx msq = magnetization(sp);
  msq *= msq;
  CorrelationResult out;
  out.M = M;
  out.N = N;
  out.method = "formfactor";
  cplx acc(1.0, 0.0);
  double last = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    FormFactorTerm term = formfactor_term(M, std::abs(N), sp, n, m_nodes, threads);
    acc += term.value;
    last = std::abs(msq * term.value);
  }
  out.value = msq * acc;
  out.err_est = last;
  return out;
}

} // namespace isinglab
