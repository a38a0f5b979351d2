#pragma once

#include <cstdint>
#include <vector>

#include "isinglab/contour.hpp"
#include "isinglab/spectral.hpp"
#include "isinglab/types.hpp"

namespace isinglab {

// Budget is charged in inner-loop evaluations actually performed: the
// factorized n=2 engine charges ~m^3, the generic tensor walk m^{2n} (each
// plus its embedded half-resolution pass).
inline constexpr std::uint64_t default_eval_budget = 1ull << 28;

struct ChiTerm {
  int n = 0;
  cplx value{0.0, 0.0};
  double err_est = 0.0;
  double r_used = 0.0;
  int m_used = 0;
};

// 2n-fold contour integral for the order-n term of the susceptibility
// expansion (n even): prefactor (1/n!)(1/2pi i)^{2n}, integrand
//   F(x) F(y) Delta(x,y) prod_{j<k} F_jk(x) F_jk(y) (x_j-x_k)(y_j-y_k)
//     * prod_j 1/D(x_j, y_j)
// over C_r^n x C_r^n.  n=2 runs through a factorized O(m^3) evaluator;
// even n >= 4 through the generic walk (m^{2n} leaves, budget-gated).
ChiTerm chi_n(int n, const SpectralPoint& sp, const ContourGrid& grid,
              int threads = 0, std::uint64_t budget = default_eval_budget);

// Same value as chi_n(2) after both y-integrals are collapsed onto the
// enclosed pole of 1/D, leaving a double integral over C_r^2:
//   (1/2pi i)^2 oint (dx1/x1)(dx2/x2) (x1-x2)/(1-x1 x2)^2
//     * (E1-E2) E1 E2 / ((1-E1 E2)^2 sinh g1 sinh g2),  E = e^{-gamma(x)}.
// O(m^2); the workhorse for parameter points that need very large m.
ChiTerm chi2_reduced(const SpectralPoint& sp, const ContourGrid& grid,
                     int threads = 0);

struct SusceptibilitySum {
  int n_max = 0;
  cplx value{0.0, 0.0};
  cplx mag_sq{0.0, 0.0};
  std::vector<ChiTerm> terms; // terms[j] holds order n = 2(j+1)
  double err_est = 0.0;
};

// Partial sum 1 - M^2 + 2 M^2 sum_{j=1..n_max} chi^(2j).
SusceptibilitySum susceptibility(const SpectralPoint& sp, int n_max,
                                 const ContourGrid& grid, int threads = 0,
                                 std::uint64_t budget = default_eval_budget);

// Per-lattice-point contour integral at form-factor order n: 2n variables
// per family (4n folds), prefactor (1/(2n)!)(1/2pi i)^{4n}, integrand
//   prod_{j<k} [(x_j-x_k)/(1-x_j x_k)] [(y_j-y_k)/(1-y_j y_k)]
//     * prod_j x_j^M y_j^N / D(x_j, y_j)
// with measure prod_j (dx_j/x_j)(dy_j/y_j).  Normalization is calibrated so
// the result equals the order-n term of the form-factor expansion; the
// cross-module agreement test pins it.
cplx corr_integral(int M, int N, const SpectralPoint& sp, int n,
                   const ContourGrid& grid, int threads = 0,
                   std::uint64_t budget = default_eval_budget);

// Generic engine behind corr_integral: q variables per family (2q folds),
// prefactor (1/q!)(1/2pi i)^{2q}.  Exposed because the odd-q members are
// useful oracles (q=1 collapses to a single residue-reduced integral).
cplx corr_contour_sum(int q, int M, int N, const SpectralPoint& sp,
                      const ContourGrid& grid, int threads = 0,
                      std::uint64_t budget = default_eval_budget);

// Reference-path evaluators: the same integrals through the plain tensor
// walk, bypassing the factorized O(m^3) engines.  They exist so the fast
// paths stay equivalence-tested against an independently-ordered sum.
cplx chi_n_walk(int n, const SpectralPoint& sp, const ContourGrid& grid,
                int threads = 0, std::uint64_t budget = default_eval_budget);
cplx corr_walk(int q, int M, int N, const SpectralPoint& sp,
               const ContourGrid& grid, int threads = 0,
               std::uint64_t budget = default_eval_budget);

// | (1/2pi i) oint_{C_r} y^{N-1} / D(x,y;s) dy  -  e^{-N gamma(x)} / sinh gamma(x) |
// Valid whenever |e^{-gamma(x)}| < r < |e^{gamma(x)}|, which certified
// grids guarantee for x on C_r and which extends to x on the unit circle.
double residue_identity_check(cplx x, int N, const SpectralPoint& sp,
                              const ContourGrid& grid);

struct LatticeSumResult {
  cplx lhs{0.0, 0.0};      // weighted lattice sum of corr_integral values
  cplx rhs{0.0, 0.0};      // closed-form replacement integral
  double residual_rel = 0.0;
};

// Checks that sum_{(M,N) != (0,0), 0 <= M,N <= W} w(M,N) corr_integral(M,N)
// with weights w = 4 - 2[M=0] - 2[N=0] matches the integral with
// prod x^M y^N replaced by 2 (prod x + prod y)/((1-prod x)(1-prod y)).
LatticeSumResult lattice_sum_check(const SpectralPoint& sp, int n, int W,
                                   const ContourGrid& grid, int threads = 0);

} // namespace isinglab
