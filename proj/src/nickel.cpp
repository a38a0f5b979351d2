#include "isinglab/nickel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "isinglab/errors.hpp"

namespace isinglab {

namespace {

double root_re(int j, int n) { return std::cos(two_pi * j / n); }

} // namespace

std::vector<NickelPoint> nickel_enumerate(int n, bool include_repeats) {
  if (n < 1) throw ValidationError("nickel_enumerate: order must be >= 1");
  struct Cand {
    double re;
    int j, k;
  };
  std::vector<Cand> cands;
  for (int j = 0; j < n; ++j)
    for (int k = include_repeats ? j : j + 1; k < n; ++k)
      cands.push_back({0.5 * (root_re(j, n) + root_re(k, n)), j, k});
  // Descending real part = ascending principal angle; (j, k) tie-break
  // keeps the grouping sweep deterministic.
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.re != b.re) return a.re > b.re;
    if (a.j != b.j) return a.j < b.j;
    return a.k < b.k;
  });
  std::vector<NickelPoint> out;
  std::size_t i = 0;
  while (i < cands.size()) {
    std::size_t e = i + 1;
    while (e < cands.size() && cands[i].re - cands[e].re <= 1e-12) ++e;
    const Cand* w = &cands[i];
    for (std::size_t q = i + 1; q < e; ++q)
      if (cands[q].j < w->j || (cands[q].j == w->j && cands[q].k < w->k))
        w = &cands[q];
    NickelPoint p;
    p.n = n;
    p.j = w->j;
    p.k = w->k;
    p.re_value = w->re;
    double im = std::sqrt(std::max(0.0, 1.0 - p.re_value * p.re_value));
    p.points.push_back(cplx(p.re_value, im));
    if (im != 0.0) p.points.push_back(cplx(p.re_value, -im));
    out.push_back(std::move(p));
    i = e;
  }
  return out;
}

NickelMatch is_nickel(cplx s0, int n, double tol) {
  if (n < 1) throw ValidationError("is_nickel: order must be >= 1");
  if (std::abs(std::abs(s0) - 1.0) >= 1e-9)
    throw ValidationError("is_nickel: point must lie on the unit circle");
  double re = s0.real();
  NickelMatch best;
  best.distance = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      double d = std::abs(re - 0.5 * (root_re(j, n) + root_re(k, n)));
      if (d < best.distance) {
        best.distance = d;
        best.j = j;
        best.k = k;
      }
    }
  best.match = best.distance <= tol;
  return best;
}

std::vector<DensityRow> density_table(const std::vector<int>& orders) {
  std::vector<DensityRow> rows;
  for (int n : orders) {
    auto pts = nickel_enumerate(n);
    std::vector<double> angles;
    for (const auto& p : pts)
      for (const cplx& z : p.points) angles.push_back(std::atan2(z.imag(), z.real()));
    std::sort(angles.begin(), angles.end());
    DensityRow row;
    row.n = n;
    row.count = static_cast<int>(angles.size());
    if (angles.size() < 2) {
      row.max_gap = two_pi;
    } else {
      double gap = angles.front() + two_pi - angles.back();
      for (std::size_t i = 1; i < angles.size(); ++i)
        gap = std::max(gap, angles[i] - angles[i - 1]);
      row.max_gap = gap;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string nickel_csv(const std::vector<NickelPoint>& pts) {
  std::string out = "n,j,k,re_value,angle1,angle2\n";
  char buf[160];
  for (const auto& p : pts) {
    double a1 = std::atan2(p.points[0].imag(), p.points[0].real());
    if (p.points.size() == 2) {
      double a2 = std::atan2(p.points[1].imag(), p.points[1].real());
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,%.17g\n", p.n, p.j,
                    p.k, p.re_value, a1, a2);
    } else {
      std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g,%.17g,\n", p.n, p.j, p.k,
                    p.re_value, a1);
    }
    out += buf;
  }
  return out;
}

} // namespace isinglab
