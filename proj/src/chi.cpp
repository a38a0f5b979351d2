#include "isinglab/chi.hpp"

#include <cmath>

#include "isinglab/errors.hpp"
#include "isinglab/kernels.hpp"
#include "isinglab/parallel.hpp"

namespace isinglab {

namespace {

cplx ipow(cplx z, int e) {
  if (e < 0) return 1.0 / ipow(z, -e);
  cplx r(1.0, 0.0);
  while (e > 0) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

// Per-grid node tables shared by the evaluators.  x- and y-variables run
// over the same circle, so one node set serves both families.
struct Tables {
  int m = 0;
  double r = 0.0;
  std::vector<cplx> x;    // nodes
  std::vector<cplx> invx;
  std::vector<cplx> E;    // e^{-gamma(x_a)}
  std::vector<cplx> iS;   // 1 / sinh gamma(x_a)
  std::vector<cplx> invD; // [a*m+b] = 1 / D(x_a, x_b)
  std::vector<cplx> pf;   // [a*m+b] = (x_a - x_b) / (1 - x_a x_b)
  std::vector<cplx> pf2;  // pf / (1 - x_a x_b)
  std::vector<cplx> pf2u; // pf2 * invx[b]
  std::vector<cplx> Dt;   // x_a x_b invD / m^2  (chi measure weights)
};

void require_grid(const SpectralPoint& sp, const ContourGrid& grid) {
  if (!grid.certified_for(sp))
    throw InvalidGrid("chi: grid has no certificate for this parameter point");
  if (grid.m % 2 != 0)
    throw InvalidGrid("chi: even m required for the embedded error estimate");
}

Tables build_tables(const SpectralPoint& sp, const ContourGrid& grid,
                    bool pair_tables, bool residue_tables, int threads) {
  Tables t;
  t.m = grid.m;
  t.r = grid.r;
  std::size_t m = static_cast<std::size_t>(grid.m);
  t.x = grid.nodes;
  t.invx.resize(m);
  for (std::size_t a = 0; a < m; ++a) t.invx[a] = 1.0 / t.x[a];

  if (residue_tables) {
    t.E.resize(m);
    t.iS.resize(m);
    for (std::size_t a = 0; a < m; ++a) {
      cplx g = gamma_of(t.x[a], sp);
      t.E[a] = std::exp(-g);
      t.iS[a] = 1.0 / std::sinh(g);
    }
  }

  if (pair_tables) {
    t.invD.resize(m * m);
    t.pf.resize(m * m);
    t.pf2.resize(m * m);
    t.pf2u.resize(m * m);
    t.Dt.resize(m * m);
    double inv_m2 = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
    parallel_index(m, threads, [&](std::size_t a) {
      cplx xa = t.x[a];
      for (std::size_t b = 0; b < m; ++b) {
        cplx xb = t.x[b];
        cplx inv_d = 1.0 / bigD(xa, xb, sp);
        cplx c = 1.0 - xa * xb; // never 0: |xa xb| = r^2 < 1
        cplx p = (xa - xb) / c;
        t.invD[a * m + b] = inv_d;
        t.pf[a * m + b] = p;
        t.pf2[a * m + b] = p / c;
        t.pf2u[a * m + b] = p / c * t.invx[b];
        t.Dt[a * m + b] = xa * xb * inv_d * inv_m2;
      }
    });
  }
  return t;
}

// Factorized sum for the order-2 term: with PX(a,a') = (x_a - x_a')/(1 -
// x_a x_a')^2 and Dt the weighted 1/D table,
//   sum = Sum_{a1 a2 b1 b2} PX(a1,a2) PX(b1,b2)
//         (invx[a1] invx[a2] + invx[b1] invx[b2]) Dt(a1,b1) Dt(a2,b2),
// accumulated as two O(m^2) kernel passes per b1.  Caller divides by 2!.
cplx chi2_sum(const Tables& t, int threads) {
  std::size_t m = static_cast<std::size_t>(t.m);
  return reduce_tiles<cplx>(m, 4, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<cplx> S1(m), S2(m);
    cplx part(0.0, 0.0);
    for (std::size_t b1 = lo; b1 < hi; ++b1) {
      const cplx* q1 = &t.pf2[b1 * m];
      const cplx* q2 = &t.pf2u[b1 * m];
      for (std::size_t a2 = 0; a2 < m; ++a2) {
        const cplx* dt = &t.Dt[a2 * m];
        S1[a2] = kdot_cc(q1, dt, m);
        S2[a2] = kdot_cc(q2, dt, m);
      }
      cplx acc(0.0, 0.0);
      for (std::size_t a1 = 0; a1 < m; ++a1) {
        cplx inner = t.invx[a1] * kdot_cc(&t.pf2u[a1 * m], S1.data(), m) +
                     t.invx[b1] * kdot_cc(&t.pf2[a1 * m], S2.data(), m);
        acc += t.Dt[a1 * m + b1] * inner;
      }
      part += acc;
    }
    return part;
  });
}

// Factorized sum for the per-lattice-point integral at q=2: node powers
// xp[a] = x_a^M, yp[b] = x_b^N.  Caller divides by 2!.
cplx ci2_sum(const Tables& t, const std::vector<cplx>& xp,
             const std::vector<cplx>& yp, int threads) {
  std::size_t m = static_cast<std::size_t>(t.m);
  double inv_m2 = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
  return reduce_tiles<cplx>(m, 4, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<cplx> qrow(m), S(m);
    cplx part(0.0, 0.0);
    for (std::size_t b1 = lo; b1 < hi; ++b1) {
      for (std::size_t b2 = 0; b2 < m; ++b2)
        qrow[b2] = t.pf[b1 * m + b2] * yp[b2];
      for (std::size_t a2 = 0; a2 < m; ++a2)
        S[a2] = xp[a2] * inv_m2 * kdot_cc(qrow.data(), &t.invD[a2 * m], m);
      cplx acc(0.0, 0.0);
      for (std::size_t a1 = 0; a1 < m; ++a1) {
        cplx T1 = xp[a1] * yp[b1] * t.invD[a1 * m + b1] * inv_m2;
        acc += T1 * kdot_cc(&t.pf[a1 * m], S.data(), m);
      }
      part += acc;
    }
    return part;
  });
}

// Generic tensor walk over n variables per family.  Mode chooses the leaf:
// the chi integrand (X+Y)/((1-X)(1-Y)) with chi measure, or the lattice
// power prod x^M y^N with dx/x measure.
struct Walk {
  const Tables* t;
  int n;
  bool chi_leaf;
  const std::vector<cplx>* xp = nullptr; // corr mode node powers
  const std::vector<cplx>* yp = nullptr;

  std::vector<int> ax, by;
  cplx px_leaf, Xleaf;

  cplx from_first(int a0) {
    ax.assign(static_cast<std::size_t>(n), 0);
    by.assign(static_cast<std::size_t>(n), 0);
    ax[0] = a0;
    cplx base = chi_leaf ? t->x[static_cast<std::size_t>(a0)]
                         : (*xp)[static_cast<std::size_t>(a0)];
    return x_level(1, cplx(1.0, 0.0), base);
  }

  cplx x_level(int lvl, cplx pair, cplx prod) {
    std::size_t m = static_cast<std::size_t>(t->m);
    if (lvl == n) {
      px_leaf = pair;
      Xleaf = prod;
      return y_level(0, cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0));
    }
    cplx acc(0.0, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      cplx p = pair;
      for (int u = 0; u < lvl; ++u)
        p *= t->pf[static_cast<std::size_t>(ax[static_cast<std::size_t>(u)]) * m + a];
      ax[static_cast<std::size_t>(lvl)] = static_cast<int>(a);
      cplx np = prod * (chi_leaf ? t->x[a] : (*xp)[a]);
      acc += x_level(lvl + 1, p, np);
    }
    return acc;
  }

  cplx y_level(int lvl, cplx pair, cplx prod, cplx pd) {
    std::size_t m = static_cast<std::size_t>(t->m);
    if (lvl == n) {
      if (chi_leaf)
        return px_leaf * pair * pd * (Xleaf + prod) /
               ((1.0 - Xleaf) * (1.0 - prod));
      return px_leaf * pair * pd * Xleaf * prod;
    }
    cplx acc(0.0, 0.0);
    for (std::size_t b = 0; b < m; ++b) {
      cplx p = pair;
      for (int u = 0; u < lvl; ++u)
        p *= t->pf[static_cast<std::size_t>(by[static_cast<std::size_t>(u)]) * m + b];
      by[static_cast<std::size_t>(lvl)] = static_cast<int>(b);
      cplx nd =
          pd * t->invD[static_cast<std::size_t>(ax[static_cast<std::size_t>(lvl)]) * m + b];
      cplx np = prod * (chi_leaf ? t->x[b] : (*yp)[b]);
      acc += y_level(lvl + 1, p, np, nd);
    }
    return acc;
  }
};

cplx walk_sum(const Tables& t, int n, bool chi_leaf, const std::vector<cplx>* xp,
              const std::vector<cplx>* yp, int threads) {
  std::size_t m = static_cast<std::size_t>(t.m);
  std::vector<cplx> parts(m);
  parallel_index(m, threads, [&](std::size_t a0) {
    Walk w;
    w.t = &t;
    w.n = n;
    w.chi_leaf = chi_leaf;
    w.xp = xp;
    w.yp = yp;
    parts[a0] = w.from_first(static_cast<int>(a0));
  });
  return tree_combine(parts);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Even-indexed sub-tables: the embedded half-resolution grid.  Dt carries
// the 1/m^2 measure weight, so subsampled entries are rescaled.
Tables subsample_tables(const Tables& t) {
  Tables c;
  c.m = t.m / 2;
  c.r = t.r;
  std::size_t m = static_cast<std::size_t>(t.m);
  std::size_t mc = static_cast<std::size_t>(c.m);
  auto pick = [&](const std::vector<cplx>& v, std::vector<cplx>& out) {
    if (v.empty()) return;
    out.resize(mc);
    for (std::size_t a = 0; a < mc; ++a) out[a] = v[2 * a];
  };
  pick(t.x, c.x);
  pick(t.invx, c.invx);
  pick(t.E, c.E);
  pick(t.iS, c.iS);
  auto pick2 = [&](const std::vector<cplx>& v, std::vector<cplx>& out,
                   double scale) {
    if (v.empty()) return;
    out.resize(mc * mc);
    for (std::size_t a = 0; a < mc; ++a)
      for (std::size_t b = 0; b < mc; ++b)
        out[a * mc + b] = scale * v[2 * a * m + 2 * b];
  };
  pick2(t.invD, c.invD, 1.0);
  pick2(t.pf, c.pf, 1.0);
  pick2(t.pf2, c.pf2, 1.0);
  pick2(t.pf2u, c.pf2u, 1.0);
  pick2(t.Dt, c.Dt, 4.0);
  return c;
}

// Leaf count m^{folds} with saturation.
std::uint64_t leaf_cost(int m, int folds) {
  double c = std::pow(static_cast<double>(m), static_cast<double>(folds));
  if (c > 9e18) return ~0ull;
  return static_cast<std::uint64_t>(c);
}

void charge(std::uint64_t cost, std::uint64_t budget, const char* what) {
  if (cost > budget)
    throw BudgetExceeded(std::string(what) +
                         ": evaluation count exceeds the configured budget");
}

std::vector<cplx> node_powers(const std::vector<cplx>& nodes, int e) {
  std::vector<cplx> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = ipow(nodes[i], e);
  return out;
}

cplx chi_value_from(const Tables& t, int n, int threads) {
  if (n == 2) return 0.5 * chi2_sum(t, threads);
  cplx sum = walk_sum(t, n, true, nullptr, nullptr, threads);
  return sum / factorial(n) / std::pow(static_cast<double>(t.m), 2.0 * n);
}

} // namespace

ChiTerm chi_n(int n, const SpectralPoint& sp, const ContourGrid& grid,
              int threads, std::uint64_t budget) {
  if (n < 2 || n % 2 != 0)
    throw ValidationError("chi_n: n must be even and at least 2");
  require_grid(sp, grid);

  std::uint64_t fine = n == 2 ? leaf_cost(grid.m, 3) : leaf_cost(grid.m, 2 * n);
  std::uint64_t coarse =
      n == 2 ? leaf_cost(grid.m / 2, 3) : leaf_cost(grid.m / 2, 2 * n);
  charge(fine + coarse, budget, "chi_n");

  Tables t = build_tables(sp, grid, true, false, threads);
  cplx v = chi_value_from(t, n, threads);
  cplx vc = chi_value_from(subsample_tables(t), n, threads);

  ChiTerm out;
  out.n = n;
  out.value = v;
  out.err_est = std::abs(v - vc);
  out.r_used = grid.r;
  out.m_used = grid.m;
  return out;
}

ChiTerm chi2_reduced(const SpectralPoint& sp, const ContourGrid& grid,
                     int threads) {
  require_grid(sp, grid);
  Tables t = build_tables(sp, grid, false, true, threads);
  std::size_t m = static_cast<std::size_t>(t.m);

  auto value_on = [&](const std::vector<cplx>& x, const std::vector<cplx>& E,
                      const std::vector<cplx>& iS) {
    std::size_t mm = x.size();
    cplx sum = reduce_tiles<cplx>(
        mm, 16, threads, [&](std::size_t lo, std::size_t hi) {
          cplx part(0.0, 0.0);
          for (std::size_t a = lo; a < hi; ++a)
            part += chi2_pair_row(x[a], E[a], iS[a], x.data(), E.data(),
                                  iS.data(), mm);
          return part;
        });
    return sum / (static_cast<double>(mm) * static_cast<double>(mm));
  };

  cplx v = value_on(t.x, t.E, t.iS);

  std::vector<cplx> xc, Ec, iSc;
  for (std::size_t a = 0; a < m; a += 2) {
    xc.push_back(t.x[a]);
    Ec.push_back(t.E[a]);
    iSc.push_back(t.iS[a]);
  }
  cplx vc = value_on(xc, Ec, iSc);

  ChiTerm out;
  out.n = 2;
  out.value = v;
  out.err_est = std::abs(v - vc);
  out.r_used = grid.r;
  out.m_used = grid.m;
  return out;
}

SusceptibilitySum susceptibility(const SpectralPoint& sp, int n_max,
                                 const ContourGrid& grid, int threads,
                                 std::uint64_t budget) {
  if (n_max < 0) throw ValidationError("susceptibility: n_max must be >= 0");
  SusceptibilitySum out;
  out.n_max = n_max;
  cplx msq = magnetization(sp);
  msq *= msq;
  out.mag_sq = msq;
  cplx acc = 1.0 - msq;
  for (int j = 1; j <= n_max; ++j) {
    ChiTerm term = chi_n(2 * j, sp, grid, threads, budget);
    acc += 2.0 * msq * term.value;
    out.err_est += 2.0 * std::abs(msq) * term.err_est;
    out.terms.push_back(std::move(term));
  }
  out.value = acc;
  return out;
}

cplx corr_integral(int M, int N, const SpectralPoint& sp, int n,
                   const ContourGrid& grid, int threads,
                   std::uint64_t budget) {
  if (M < 0 || N < 0)
    throw ValidationError("corr_integral: M and N must be >= 0");
  if (n < 1) throw ValidationError("corr_integral: n must be >= 1");
  return corr_contour_sum(2 * n, M, N, sp, grid, threads, budget);
}

cplx corr_contour_sum(int q, int M, int N, const SpectralPoint& sp,
                      const ContourGrid& grid, int threads,
                      std::uint64_t budget) {
  if (q < 1) throw ValidationError("corr_contour_sum: q must be >= 1");
  require_grid(sp, grid);

  std::size_t m = static_cast<std::size_t>(grid.m);
  Tables t = build_tables(sp, grid, true, false, threads);
  std::vector<cplx> xp = node_powers(t.x, M);
  std::vector<cplx> yp = node_powers(t.x, N);

  if (q == 2) {
    charge(leaf_cost(grid.m, 3), budget, "corr_contour_sum");
    return 0.5 * ci2_sum(t, xp, yp, threads);
  }

  charge(leaf_cost(grid.m, 2 * q), budget, "corr_contour_sum");
  cplx sum = walk_sum(t, q, false, &xp, &yp, threads);
  double norm =
      1.0 / factorial(q) / std::pow(static_cast<double>(m), 2.0 * q);
  return sum * norm;
}

cplx chi_n_walk(int n, const SpectralPoint& sp, const ContourGrid& grid,
                int threads, std::uint64_t budget) {
  if (n < 2 || n % 2 != 0)
    throw ValidationError("chi_n_walk: n must be even and at least 2");
  require_grid(sp, grid);
  charge(leaf_cost(grid.m, 2 * n), budget, "chi_n_walk");
  Tables t = build_tables(sp, grid, true, false, threads);
  cplx sum = walk_sum(t, n, true, nullptr, nullptr, threads);
  return sum / factorial(n) /
         std::pow(static_cast<double>(grid.m), 2.0 * n);
}

cplx corr_walk(int q, int M, int N, const SpectralPoint& sp,
               const ContourGrid& grid, int threads, std::uint64_t budget) {
  if (q < 1) throw ValidationError("corr_walk: q must be >= 1");
  require_grid(sp, grid);
  charge(leaf_cost(grid.m, 2 * q), budget, "corr_walk");
  Tables t = build_tables(sp, grid, true, false, threads);
  std::vector<cplx> xp = node_powers(t.x, M);
  std::vector<cplx> yp = node_powers(t.x, N);
  cplx sum = walk_sum(t, q, false, &xp, &yp, threads);
  return sum / factorial(q) /
         std::pow(static_cast<double>(grid.m), 2.0 * q);
}

double residue_identity_check(cplx x, int N, const SpectralPoint& sp,
                              const ContourGrid& grid) {
  if (!grid.certified_for(sp))
    throw InvalidGrid("residue_identity_check: uncertified grid");
  auto f = [&](std::span<const cplx> y) {
    return ipow(y[0], N - 1) / bigD(x, y[0], sp);
  };
  QuadratureResult q = circle_integral(f, {grid}, 1);
  cplx g = gamma_of(x, sp);
  cplx expect = std::exp(-static_cast<double>(N) * g) / std::sinh(g);
  return std::abs(q.value - expect);
}

LatticeSumResult lattice_sum_check(const SpectralPoint& sp, int n, int W,
                                   const ContourGrid& grid, int threads) {
  if (n != 1)
    throw ValidationError("lattice_sum_check: only n=1 is supported");
  if (sp.s.imag() != 0.0 || sp.s.real() < 1.5)
    throw ValidationError("lattice_sum_check: requires real s >= 1.5");
  if (W < 1) throw ValidationError("lattice_sum_check: W must be >= 1");
  require_grid(sp, grid);

  Tables t = build_tables(sp, grid, true, false, threads);
  std::size_t side = static_cast<std::size_t>(W) + 1;

  // One slot per (M,N); each entry is evaluated serially and the weighted
  // sum is taken in fixed lattice order afterwards.
  std::vector<cplx> vals(side * side, cplx(0.0, 0.0));
  parallel_index(side * side, threads, [&](std::size_t i) {
    int M = static_cast<int>(i / side);
    int N = static_cast<int>(i % side);
    if (M == 0 && N == 0) return;
    std::vector<cplx> xp = node_powers(t.x, M);
    std::vector<cplx> yp = node_powers(t.x, N);
    vals[i] = 0.5 * ci2_sum(t, xp, yp, 1);
  });

  cplx lhs(0.0, 0.0);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    int M = static_cast<int>(i / side);
    int N = static_cast<int>(i % side);
    if (M == 0 && N == 0) continue;
    double w = 4.0 - (M == 0 ? 2.0 : 0.0) - (N == 0 ? 2.0 : 0.0);
    lhs += w * vals[i];
  }

  cplx rhs = 2.0 * 0.5 * chi2_sum(t, threads);

  LatticeSumResult out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.residual_rel = std::abs(lhs - rhs) / std::abs(rhs);
  return out;
}

} // namespace isinglab
