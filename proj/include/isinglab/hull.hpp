#pragma once
// Convex-hull certificates for candidate singular configurations on the
// torus.  A configuration activates a set of vectors in R^{2n} (one per
// singular factor); the origin lying outside their convex hull is what
// rules the configuration out, and the separation margin survives small
// perturbations of the vertices.

#include <cstdint>
#include <string>
#include <vector>

#include "isinglab/types.hpp"

namespace isinglab {

struct TorusConfiguration {
  int n = 0;
  std::vector<cplx> x0;
  std::vector<cplx> y0;
  cplx s0{1.0, 0.0};
  double tol_active = 1e-9;
};

enum class VectorKind { X, Y, Xjk, Yjk, Zj };

struct HullVector {
  VectorKind kind = VectorKind::X;
  int j = -1;              // 0-based indices; -1 where not applicable
  int k = -1;
  std::vector<double> v;   // dimension 2n
  std::string label() const;  // display form, 1-based ("X_12", "Z_3")
};

struct HullVectors {
  int n = 0;
  std::vector<HullVector> vecs;
};

// The vectors whose factors are active at cfg.tol_active.  Configurations
// with the distinguished point in the lower half-plane are conjugated
// wholesale first; that preserves every activity flag and flips the sign
// vectors consistently.  May return an empty set (no singular factor).
HullVectors active_vectors(const TorusConfiguration& cfg);

struct HullCertificate {
  enum class Kind { Containment, Separation, Indeterminate } kind =
      Kind::Indeterminate;
  // Containment: convex coefficients over the input vectors, and the
  // recomputed residual |sum c_i V_i|.
  std::vector<double> coefficients;
  double residual = 0.0;
  // Separation: unit direction and margin delta = min_i <u, V_i>,
  // recomputed by direct dot products.
  std::vector<double> direction;
  double margin = 0.0;
  int iterations = 0;
};

// Minimum-norm point of the hull by support-point iteration with
// working-set norm minimization.  Every certificate is re-verified by
// direct arithmetic before being returned; a run that exhausts max_iter
// or lands within tol of degeneracy reports Indeterminate.
HullCertificate hull_distance(const HullVectors& vecs, double tol = 1e-10,
                              int max_iter = 10000);

// Perturbation-stable margin: with separation distance d and vertex
// perturbations bounded by eps < d, any nonnegative combination keeps
// norm at least (d - eps) times the coefficient sum.
double lemma2_margin(const HullVectors& vecs, double eps, double tol = 1e-10,
                     int max_iter = 10000);

struct LemmaOneReport {
  int n = 0;
  int trials = 0;
  int separations = 0;
  int containments = 0;
  int indeterminate = 0;
  double min_delta = 0.0;    // over the constructed non-singular family
  double max_residual = 0.0; // over the witness family
  std::vector<std::string> failures;
  bool ok() const { return failures.empty() && indeterminate == 0; }
};

// Randomized two-sided check: configurations built to be non-singular must
// separate, witness configurations must contain the origin.
LemmaOneReport lemma1_randomized_verify(int n, int trials, std::uint64_t seed,
                                        int threads = 0);

struct RatioReport {
  double s0_re = 0.0;
  std::vector<double> theta;
  std::vector<double> ratio;  // sin(theta) / sin(phi) on the level set
  bool strictly_decreasing = false;
  bool strictly_increasing = false;
  bool ok = false;  // matches the direction the sign of s0_re demands
};

// Along cos(theta) + cos(phi) = 2 s0_re with both angles in (-pi, 0), the
// imaginary-part ratio is strictly monotone; its direction decides
// uniqueness of the angle pair.
RatioReport ratio_monotonicity_check(double s0_re, int samples);

} // namespace isinglab
