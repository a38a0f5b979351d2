#include "isinglab/scan.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "isinglab/chi.hpp"
#include "isinglab/errors.hpp"
#include "isinglab/parallel.hpp"

namespace isinglab {

double scan_safety(double eps) {
  if (eps >= 0.05) return 0.5;
  if (eps >= 0.005) return 0.35;
  return 0.25;
}

namespace {

ScanRow eval_ray(double phi, double eps, int threads, std::uint64_t budget) {
  ScanRow row;
  row.phi = phi;
  row.eps = eps;
  SpectralPoint sp(std::polar(1.0 + eps, phi));
  ContourGrid grid = [&] {
    try {
      return select_radius(sp, scan_safety(eps), 64);
    } catch (const NoValidRadius&) {
      row.status = ScanStatus::NoValidRadius;
      return ContourGrid{};
    }
  }();
  if (row.status == ScanStatus::NoValidRadius) {
    row.value = cplx(std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN());
    row.err_est = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  row.r_used = grid.r;
  std::uint64_t spent = 0;
  for (int m = 64;; m *= 2) {
    std::uint64_t cost = static_cast<std::uint64_t>(m) * m +
                         static_cast<std::uint64_t>(m / 2) * (m / 2);
    if (spent + cost > budget) {
      row.status = ScanStatus::BudgetExceeded;
      row.value = cplx(std::numeric_limits<double>::quiet_NaN(),
                       std::numeric_limits<double>::quiet_NaN());
      row.err_est = std::numeric_limits<double>::quiet_NaN();
      return row;
    }
    ChiTerm t = chi2_reduced(sp, grid.resampled(m), threads);
    spent += cost;
    row.value = t.value;
    row.err_est = t.err_est;
    row.m_used = m;
    if (t.err_est < 1e-4 * std::abs(t.value)) return row;
  }
}

} // namespace

std::vector<ScanRow> ray_scan(const std::vector<double>& phis,
                              const std::vector<double>& epsilons,
                              int threads, std::uint64_t budget) {
  if (phis.empty() || epsilons.empty())
    throw ValidationError("ray_scan: needs at least one angle and one eps");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (epsilons[i] <= 0.0 || epsilons[i] > 0.5)
      throw ValidationError("ray_scan: eps values must lie in (0, 0.5]");
    if (i > 0 && epsilons[i] >= epsilons[i - 1])
      throw ValidationError("ray_scan: eps values must be strictly decreasing");
  }
  std::size_t count = phis.size() * epsilons.size();
  std::vector<ScanRow> rows(count);
  int inner = count >= 2 ? 1 : threads;
  parallel_index(count, threads, [&](std::size_t i) {
    double phi = phis[i / epsilons.size()];
    double eps = epsilons[i % epsilons.size()];
    rows[i] = eval_ray(phi, eps, inner, budget);
  });
  return rows;
}

double divergence_indicator(double phi, double eps, double h, int threads,
                            std::uint64_t budget) {
  if (h <= 0.0)
    throw ValidationError("divergence_indicator: step must be positive");
  std::array<double, 3> at = {phi - h, phi, phi + h};
  std::array<double, 3> re{};
  for (std::size_t i = 0; i < 3; ++i) {
    ScanRow row = eval_ray(at[i], eps, threads, budget);
    if (row.status != ScanStatus::Ok)
      throw ComputeError("divergence_indicator: ray did not converge within "
                         "budget at the requested eps");
    re[i] = row.value.real();
  }
  return std::abs(re[0] - 2.0 * re[1] + re[2]) / (h * h);
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "phi,epsilon,re_chi,im_chi,err_est,r_used,m_used,status\n";
  char buf[256];
  for (const ScanRow& r : rows) {
    const char* status = r.status == ScanStatus::Ok ? "ok"
                         : r.status == ScanStatus::NoValidRadius
                             ? "NoValidRadius"
                             : "BudgetExceeded";
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%s\n",
                  r.phi, r.eps, r.value.real(), r.value.imag(), r.err_est,
                  r.r_used, r.m_used, status);
    out += buf;
  }
  return out;
}

} // namespace isinglab
