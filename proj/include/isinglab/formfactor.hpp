#pragma once

#include "isinglab/correlation.hpp"
#include "isinglab/spectral.hpp"
#include "isinglab/types.hpp"

namespace isinglab {

struct FormFactorTerm {
  int n = 0;
  int M = 0;
  int N = 0;
  cplx value{0.0, 0.0};
  double err_est = 0.0;
  int m_nodes = 0;
};

// Order-n term of the two-point expansion: the 2n-fold periodic integral
//   (1/(2n)!) (1/2pi)^{2n} int prod_{j<k} h(t_j,t_k)^2
//     prod_j e^{i M t_j - N gamma_j} dt_j / sinh gamma_j
// over (-pi,pi]^{2n}, n in {1, 2}.  N must be >= 0; M may be any integer.
// For real s the result is symmetrized to its real part, which makes the
// evenness in M exact to the bit: the +M and -M sums are complex conjugates
// because every table entry except the e^{iMt} phase is real.
FormFactorTerm formfactor_term(int M, int N, const SpectralPoint& sp, int n,
                               int m_nodes, int threads = 0);

// Reference path: the same sum with fully complex tables and no real
// projection.  For real s its imaginary part measures pure quadrature
// noise; for complex s this IS the production path.
cplx formfactor_term_generic(int M, int N, const SpectralPoint& sp, int n,
                             int m_nodes, int threads = 0);

// M^2 (1 + sum_{n=1..n_max} term_n), truncation of the expansion of
// <sigma_00 sigma_MN>.  n_max in {0, 1, 2}; negative N folds to |N| by
// evenness.  err_est is the magnitude of the last included term.
CorrelationResult correlation_ff(int M, int N, const SpectralPoint& sp,
                                 int n_max, int m_nodes, int threads = 0);

} // namespace isinglab
