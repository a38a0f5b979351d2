#pragma once
// Independent route to the two-point function: the correlation equals the
// squared magnetization times the Fredholm determinant det(I + g) of the
// operator with kernel e^{i M t1 - N gamma(t1)} h(t1, t2) acting with weight
// 1/(2 pi sinh gamma) on the angle interval.  Discretized by the periodic
// trapezoid rule (Nystrom), the determinant becomes an m x m dense one.

#include <vector>

#include "isinglab/correlation.hpp"
#include "isinglab/spectral.hpp"
#include "isinglab/types.hpp"

namespace isinglab {

// Discretized operator.  Weights fold the trapezoid step and the spectral
// weight together: w_j = 1/(m sinh gamma_j), positive and finite on the
// real coupling line.
struct NystromSystem {
  int m = 0;
  std::vector<double> theta;
  std::vector<cplx> gam;
  std::vector<double> weight;
  std::vector<cplx> matrix;  // row-major, A_ij = phase_i h(t_i,t_j) w_j
};

// Throws NearCriticality when min sinh gamma drops below 1e-6.
NystromSystem nystrom_build(int M, int N, const SpectralPoint& sp, int m,
                            int threads = 0);

// det(I + A) by dense LU with partial pivoting; the determinant is carried
// as (log-magnitude, phase) so large m cannot under- or overflow.  Throws
// IllConditioned when a pivot magnitude falls below 1e-13.
cplx det_one_plus(std::vector<cplx> a, int m);

// Correlation <sigma_00 sigma_MN> as magnetization^2 * det(I + A).
// Requires real s > 1, N >= 0, and even m >= 32 (the error estimate
// compares against the embedded m/2 grid).
CorrelationResult fredholm_correlation(int M, int N, const SpectralPoint& sp,
                                       int m, int threads = 0);

} // namespace isinglab
