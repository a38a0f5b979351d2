#include "isinglab/contour.hpp"

#include <cmath>
#include <limits>

#include "isinglab/errors.hpp"
#include "isinglab/parallel.hpp"

namespace isinglab {

namespace {

std::vector<cplx> circle_nodes(double r, int m) {
  std::vector<cplx> nodes(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a)
    nodes[static_cast<std::size_t>(a)] = std::polar(r, two_pi * a / m);
  return nodes;
}

void check_grid_params(double r, int m) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidGrid("ContourGrid: r must lie in (0,1)");
  if (m < 8) throw InvalidGrid("ContourGrid: m must be at least 8");
}

} // namespace

ContourGrid ContourGrid::uncertified(double r, int m) {
  check_grid_params(r, m);
  ContourGrid g;
  g.r = r;
  g.m = m;
  g.nodes = circle_nodes(r, m);
  return g;
}

ContourGrid ContourGrid::resampled(int m_new) const {
  check_grid_params(r, m_new);
  ContourGrid g = *this;
  g.m = m_new;
  g.nodes = circle_nodes(r, m_new);
  return g;
}

ContourGrid select_radius(const SpectralPoint& sp, double safety, int m) {
  if (!(safety > 0.0 && safety < 1.0))
    throw ValidationError("select_radius: safety must lie in (0,1)");
  if (m < 8) throw InvalidGrid("select_radius: m must be at least 8");

  double g0 = 1e300;
  for (int a = 0; a < radius_verify_points; ++a) {
    cplx z = std::polar(1.0, two_pi * a / radius_verify_points);
    g0 = std::min(g0, gamma_of(z, sp).real());
  }
  if (!(g0 > 0.0))
    throw NoValidRadius("select_radius: Re gamma is not positive on |z|=1");

  double L = safety * g0;
  for (int attempt = 0; attempt < 8; ++attempt, L *= 0.5) {
    double r = std::exp(-L);
    if (!(r < 1.0)) continue;
    double margin = 1e300;
    for (int a = 0; a < radius_verify_points; ++a) {
      cplx x = std::polar(r, two_pi * a / radius_verify_points);
      margin = std::min(margin, gamma_of(x, sp).real() - L);
      if (margin <= 0.0) break;
    }
    if (margin > 0.0) {
      ContourGrid g;
      g.r = r;
      g.m = m;
      g.nodes = circle_nodes(r, m);
      g.certified = true;
      g.s_certified = sp.s;
      g.margin = margin;
      return g;
    }
  }
  throw NoValidRadius("select_radius: no radius certified after 8 retries");
}

ContourGrid certify_radius(const SpectralPoint& sp, double r, int m) {
  check_grid_params(r, m);
  double L = -std::log(r);
  double margin = 1e300;
  for (int a = 0; a < radius_verify_points; ++a) {
    cplx x = std::polar(r, two_pi * a / radius_verify_points);
    margin = std::min(margin, gamma_of(x, sp).real() - L);
  }
  if (!(margin > 0.0))
    throw NoValidRadius("certify_radius: pole separation fails at r=" +
                        std::to_string(r));
  ContourGrid g;
  g.r = r;
  g.m = m;
  g.nodes = circle_nodes(r, m);
  g.certified = true;
  g.s_certified = sp.s;
  g.margin = margin;
  return g;
}

QuadratureResult circle_integral(
    const std::function<cplx(std::span<const cplx>)>& f,
    const std::vector<ContourGrid>& grids, int threads) {
  const std::size_t d = grids.size();
  if (d == 0) throw ValidationError("circle_integral: no grids");
  bool all_even = true;
  std::size_t total = 1;
  for (const auto& g : grids) {
    if (g.m < 8 || static_cast<std::size_t>(g.m) != g.nodes.size())
      throw InvalidGrid("circle_integral: malformed grid");
    if (g.m % 2 != 0) all_even = false;
    total *= static_cast<std::size_t>(g.m);
  }

  // One flat index runs over the full tensor grid; digits are per-variable
  // node indices, first variable slowest.  A fine-grid point belongs to the
  // embedded half-resolution grid iff every digit is even.
  struct Pair {
    cplx fine{0.0, 0.0};
    cplx coarse{0.0, 0.0};
    Pair& operator+=(const Pair& o) {
      fine += o.fine;
      coarse += o.coarse;
      return *this;
    }
  };

  const std::size_t tile = 4096;
  Pair acc = reduce_tiles<Pair>(
      total, tile, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<cplx> z(d);
        std::vector<std::size_t> digit(d);
        Pair part;
        for (std::size_t flat = begin; flat < end; ++flat) {
          std::size_t rem = flat;
          bool sub = true;
          cplx w(1.0, 0.0);
          for (std::size_t j = d; j-- > 0;) {
            std::size_t mj = static_cast<std::size_t>(grids[j].m);
            std::size_t a = rem % mj;
            rem /= mj;
            digit[j] = a;
            z[j] = grids[j].nodes[a];
            w *= z[j] / static_cast<double>(mj);
            if (a % 2 != 0) sub = false;
          }
          cplx fz = f(std::span<const cplx>(z.data(), d)) * w;
          part.fine += fz;
          // Coarse weight: (z/(m/2)) per variable = fine weight * 2^d.
          if (sub && all_even) part.coarse += fz;
        }
        return part;
      });

  QuadratureResult out;
  out.value = acc.fine;
  out.m_used = grids[0].m;
  out.r_used = grids[0].r;
  if (all_even) {
    cplx coarse = acc.coarse * std::pow(2.0, static_cast<double>(d));
    out.err_est = std::abs(acc.fine - coarse);
  } else {
    out.err_est = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

} // namespace isinglab
