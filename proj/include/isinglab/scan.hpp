#pragma once
// Regularity probe along rays toward the unit circle: evaluate the order-2
// term at s = (1+eps) e^{i phi} with an adaptive node ladder, and report
// per-ray rows suitable for CSV.  Off the singular set the values settle
// to a finite limit as eps shrinks; on it they blow up, which the centered
// second difference in phi makes visible even when magnitudes stay tame.

#include <cstdint>
#include <string>
#include <vector>

#include "isinglab/types.hpp"

namespace isinglab {

enum class ScanStatus { Ok, NoValidRadius, BudgetExceeded };

struct ScanRow {
  double phi = 0.0;
  double eps = 0.0;
  cplx value{0.0, 0.0};   // meaningful only when status == Ok
  double err_est = 0.0;
  double r_used = 0.0;
  int m_used = 0;
  ScanStatus status = ScanStatus::Ok;
};

// Per-row evaluation budget in node evaluations (each ladder step at m
// nodes costs m^2 plus the embedded (m/2)^2 error pass).  The default
// admits ladders up to m = 32768, which resolves eps = 1e-3.
inline constexpr std::uint64_t scan_eval_budget = 1ull << 31;

// Contour safety shrinks as the ray approaches the circle.
double scan_safety(double eps);

// One row per (phi, eps) pair, phis outer, epsilons inner.  epsilons must
// be strictly decreasing within (0, 0.5].  Rows never abort the scan;
// failures are carried as status flags.
std::vector<ScanRow> ray_scan(const std::vector<double>& phis,
                              const std::vector<double>& epsilons,
                              int threads = 0,
                              std::uint64_t budget = scan_eval_budget);

// |second phi-difference| / h^2 of the real part at fixed eps, from three
// adaptively evaluated rays.  Throws ComputeError when any ray fails to
// converge within budget.
double divergence_indicator(double phi, double eps, double h, int threads = 0,
                            std::uint64_t budget = scan_eval_budget);

// Header phi,epsilon,re_chi,im_chi,err_est,r_used,m_used,status; failed
// rows carry nan in the value fields.
std::string scan_csv(const std::vector<ScanRow>& rows);

} // namespace isinglab
