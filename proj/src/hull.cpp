#include "isinglab/hull.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "isinglab/errors.hpp"
#include "isinglab/nickel.hpp"
#include "isinglab/parallel.hpp"
#include "isinglab/rng.hpp"

namespace isinglab {

std::string HullVector::label() const {
  char buf[32];
  switch (kind) {
    case VectorKind::X: return "X";
    case VectorKind::Y: return "Y";
    case VectorKind::Xjk:
      std::snprintf(buf, sizeof buf, "X_%d%d", j + 1, k + 1);
      return buf;
    case VectorKind::Yjk:
      std::snprintf(buf, sizeof buf, "Y_%d%d", j + 1, k + 1);
      return buf;
    case VectorKind::Zj:
      std::snprintf(buf, sizeof buf, "Z_%d", j + 1);
      return buf;
  }
  return "?";
}

namespace {

void check_unit(const cplx& z, const char* what) {
  if (std::abs(std::abs(z) - 1.0) > 1e-12)
    throw ValidationError(std::string("active_vectors: ") + what +
                          " must have unit modulus");
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

// Affine minimum-norm coefficients over the working set: solve the KKT
// system [G 1; 1^T 0] (mu, nu) = (0, 1) by Gaussian elimination with
// partial pivoting.  Returns false when a pivot collapses (affinely
// dependent working set).
bool affine_min_norm(const std::vector<const HullVector*>& work,
                     std::vector<double>& mu) {
  std::size_t k = work.size();
  std::size_t d = k + 1;
  std::vector<double> a(d * d, 0.0), rhs(d, 0.0);
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      double g = dot(work[i]->v, work[j]->v);
      a[i * d + j] = g;
      scale = std::max(scale, std::abs(g));
    }
  for (std::size_t i = 0; i < k; ++i) a[i * d + k] = a[k * d + i] = 1.0;
  rhs[k] = 1.0;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(a[r * d + c]) > std::abs(a[p * d + c])) p = r;
    if (std::abs(a[p * d + c]) < 1e-13 * (1.0 + scale)) return false;
    if (p != c) {
      for (std::size_t q = c; q < d; ++q) std::swap(a[p * d + q], a[c * d + q]);
      std::swap(rhs[p], rhs[c]);
    }
    for (std::size_t r = c + 1; r < d; ++r) {
      double f = a[r * d + c] / a[c * d + c];
      if (f == 0.0) continue;
      for (std::size_t q = c; q < d; ++q) a[r * d + q] -= f * a[c * d + q];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<double> sol(d);
  for (std::size_t ri = d; ri-- > 0;) {
    double s = rhs[ri];
    for (std::size_t q = ri + 1; q < d; ++q) s -= a[ri * d + q] * sol[q];
    sol[ri] = s / a[ri * d + ri];
  }
  mu.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(k));
  return true;
}

} // namespace

HullVectors active_vectors(const TorusConfiguration& cfg) {
  if (cfg.n < 1) throw ValidationError("active_vectors: n must be >= 1");
  if (cfg.x0.size() != static_cast<std::size_t>(cfg.n) ||
      cfg.y0.size() != static_cast<std::size_t>(cfg.n))
    throw ValidationError("active_vectors: x0 and y0 must each hold n points");
  for (const cplx& z : cfg.x0) check_unit(z, "x0 entries");
  for (const cplx& z : cfg.y0) check_unit(z, "y0 entries");
  check_unit(cfg.s0, "s0");

  // The analyzed half-plane has Im s0 >= 0; the mirror configuration is
  // handled by conjugating everything, which keeps every activity flag.
  std::vector<cplx> x = cfg.x0, y = cfg.y0;
  cplx s0 = cfg.s0;
  if (s0.imag() < 0.0) {
    for (cplx& z : x) z = std::conj(z);
    for (cplx& z : y) z = std::conj(z);
    s0 = std::conj(s0);
  }

  int n = cfg.n;
  double tol = cfg.tol_active;
  HullVectors out;
  out.n = n;
  std::size_t dim = 2 * static_cast<std::size_t>(n);
  auto push = [&](VectorKind kind, int j, int k, std::vector<double> v) {
    out.vecs.push_back(HullVector{kind, j, k, std::move(v)});
  };

  cplx px(1.0, 0.0), py(1.0, 0.0);
  for (int j = 0; j < n; ++j) {
    px *= x[static_cast<std::size_t>(j)];
    py *= y[static_cast<std::size_t>(j)];
  }
  if (std::abs(px - 1.0) <= tol) {
    std::vector<double> v(dim, 0.0);
    std::fill(v.begin(), v.begin() + n, 1.0);
    push(VectorKind::X, -1, -1, std::move(v));
  }
  if (std::abs(py - 1.0) <= tol) {
    std::vector<double> v(dim, 0.0);
    std::fill(v.begin() + n, v.end(), 1.0);
    push(VectorKind::Y, -1, -1, std::move(v));
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      if (std::abs(x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(k)] - 1.0) <= tol) {
        std::vector<double> v(dim, 0.0);
        v[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(k)] = 1.0;
        push(VectorKind::Xjk, j, k, std::move(v));
      }
      if (std::abs(y[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(k)] - 1.0) <= tol) {
        std::vector<double> v(dim, 0.0);
        v[static_cast<std::size_t>(n + j)] = v[static_cast<std::size_t>(n + k)] = 1.0;
        push(VectorKind::Yjk, j, k, std::move(v));
      }
    }
  for (int j = 0; j < n; ++j) {
    double gap = x[static_cast<std::size_t>(j)].real() +
                 y[static_cast<std::size_t>(j)].real() - 2.0 * s0.real();
    if (std::abs(gap) <= tol) {
      std::vector<double> v(dim, 0.0);
      v[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)].imag();
      v[static_cast<std::size_t>(n + j)] = y[static_cast<std::size_t>(j)].imag();
      push(VectorKind::Zj, j, -1, std::move(v));
    }
  }
  return out;
}

HullCertificate hull_distance(const HullVectors& hv, double tol, int max_iter) {
  const auto& V = hv.vecs;
  if (V.empty())
    throw ValidationError("hull_distance: needs at least one vector");
  if (tol <= 0.0 || max_iter < 1)
    throw ValidationError("hull_distance: tol must be positive, max_iter >= 1");
  std::size_t nv = V.size();
  std::size_t dim = V[0].v.size();
  for (const auto& w : V)
    if (w.v.size() != dim)
      throw ValidationError("hull_distance: inconsistent vector dimensions");

  // Working set starts from the shortest vertex.
  std::size_t start = 0;
  for (std::size_t i = 1; i < nv; ++i)
    if (norm(V[i].v) < norm(V[start].v)) start = i;
  std::vector<std::size_t> sel = {start};
  std::vector<double> lam = {1.0};
  std::vector<double> p = V[start].v;

  auto rebuild = [&]() {
    std::fill(p.begin(), p.end(), 0.0);
    for (std::size_t i = 0; i < sel.size(); ++i)
      for (std::size_t q = 0; q < dim; ++q) p[q] += lam[i] * V[sel[i]].v[q];
  };

  int iter = 0;
  bool converged = false;
  bool stalled = false;
  for (; iter < max_iter; ++iter) {
    double pn2 = dot(p, p);
    std::size_t istar = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nv; ++i) {
      double d = dot(p, V[i].v);
      if (d < dmin) {
        dmin = d;
        istar = i;
      }
    }
    if (pn2 - dmin <= tol * (1.0 + pn2)) {
      converged = true;
      break;
    }
    if (std::find(sel.begin(), sel.end(), istar) != sel.end()) break;
    sel.push_back(istar);
    lam.push_back(0.0);

    while (true) {
      std::vector<const HullVector*> work;
      for (std::size_t i : sel) work.push_back(&V[i]);
      std::vector<double> mu;
      if (!affine_min_norm(work, mu)) {
        // degenerate working set: retreating would loop, so give up and
        // let the caller see Indeterminate
        sel.pop_back();
        lam.pop_back();
        stalled = true;
        break;
      }
      double mmin = *std::min_element(mu.begin(), mu.end());
      if (mmin > -1e-12) {
        lam = mu;
        for (double& c : lam) c = std::max(c, 0.0);
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu[i] <= 0.0 && lam[i] - mu[i] > 0.0)
          theta = std::min(theta, lam[i] / (lam[i] - mu[i]));
      for (std::size_t i = 0; i < lam.size(); ++i)
        lam[i] = (1.0 - theta) * lam[i] + theta * mu[i];
      bool dropped = false;
      for (std::size_t i = sel.size(); i-- > 0;)
        if (lam[i] <= 1e-14) {
          sel.erase(sel.begin() + static_cast<std::ptrdiff_t>(i));
          lam.erase(lam.begin() + static_cast<std::ptrdiff_t>(i));
          dropped = true;
        }
      if (!dropped) {
        // numerically stuck minor cycle; drop the smallest coefficient
        std::size_t w = static_cast<std::size_t>(
            std::min_element(lam.begin(), lam.end()) - lam.begin());
        sel.erase(sel.begin() + static_cast<std::ptrdiff_t>(w));
        lam.erase(lam.begin() + static_cast<std::ptrdiff_t>(w));
      }
      if (sel.size() == 1) {
        lam = {1.0};
        break;
      }
    }
    double lsum = 0.0;
    for (double c : lam) lsum += c;
    for (double& c : lam) c /= lsum;
    rebuild();
    if (stalled) break;
  }

  HullCertificate cert;
  cert.iterations = iter;
  if (!converged) {
    cert.kind = HullCertificate::Kind::Indeterminate;
    return cert;
  }
  rebuild();
  double d = norm(p);
  if (d <= tol) {
    std::vector<double> c(nv, 0.0);
    double csum = 0.0;
    for (std::size_t i = 0; i < sel.size(); ++i) {
      c[sel[i]] += std::max(lam[i], 0.0);
      csum += std::max(lam[i], 0.0);
    }
    for (double& ci : c) ci /= csum;
    // re-verify by direct arithmetic, independent of the iteration state
    std::vector<double> r(dim, 0.0);
    for (std::size_t i = 0; i < nv; ++i)
      for (std::size_t q = 0; q < dim; ++q) r[q] += c[i] * V[i].v[q];
    double resid = norm(r);
    if (resid <= 10.0 * tol) {
      cert.kind = HullCertificate::Kind::Containment;
      cert.coefficients = std::move(c);
      cert.residual = resid;
      return cert;
    }
    cert.kind = HullCertificate::Kind::Indeterminate;
    return cert;
  }
  std::vector<double> u = p;
  for (double& q : u) q /= d;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nv; ++i)
    margin = std::min(margin, dot(u, V[i].v));
  if (margin > 0.0) {
    cert.kind = HullCertificate::Kind::Separation;
    cert.direction = std::move(u);
    cert.margin = margin;
    return cert;
  }
  cert.kind = HullCertificate::Kind::Indeterminate;
  return cert;
}

double lemma2_margin(const HullVectors& vecs, double eps, double tol,
                     int max_iter) {
  if (eps < 0.0) throw ValidationError("lemma2_margin: eps must be >= 0");
  HullCertificate cert = hull_distance(vecs, tol, max_iter);
  if (cert.kind != HullCertificate::Kind::Separation)
    throw ComputeError(
        "lemma2_margin: configuration has no separation certificate");
  if (eps >= cert.margin)
    throw ValidationError(
        "lemma2_margin: perturbation radius reaches the separation "
        "distance; no positive margin derivable");
  return cert.margin - eps;
}

namespace {

std::string dump_config(const TorusConfiguration& cfg, const char* what) {
  char buf[128];
  std::string s = what;
  std::snprintf(buf, sizeof buf, ": n=%d s0=(%.17g,%.17g) x=[", cfg.n,
                cfg.s0.real(), cfg.s0.imag());
  s += buf;
  for (const cplx& z : cfg.x0) {
    std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", z.real(), z.imag());
    s += buf;
  }
  s += "] y=[";
  for (const cplx& z : cfg.y0) {
    std::snprintf(buf, sizeof buf, "(%.17g,%.17g)", z.real(), z.imag());
    s += buf;
  }
  s += "]";
  return s;
}

cplx draw_non_singular_s0(SplitMix64& rng, int n) {
  for (int t = 0; t < 100000; ++t) {
    double re = rng.uniform(-0.45, 0.45);
    cplx s0(re, std::sqrt(std::max(0.0, 1.0 - re * re)));
    if (!is_nickel(s0, n, 1e-3).match) return s0;
  }
  throw ComputeError("lemma1: could not draw an off-singularity point");
}

// y on the circle whose real part closes the per-index activity condition.
cplx matching_y(double re_s0, const cplx& x, SplitMix64& rng) {
  double c = 2.0 * re_s0 - x.real();
  double im = std::sqrt(std::max(0.0, 1.0 - c * c));
  return cplx(c, rng.coin() ? im : -im);
}

cplx draw_feasible_unit(double re_s0, SplitMix64& rng) {
  for (int t = 0; t < 100000; ++t) {
    cplx x = std::polar(1.0, rng.angle());
    if (std::abs(2.0 * re_s0 - x.real()) <= 0.995) return x;
  }
  throw ComputeError("lemma1: feasibility draw failed");
}

// Families of constructed non-singular configurations.  Every family makes
// the per-index factors active; some add a product or pair factor.
TorusConfiguration make_type_a(int n, int family, SplitMix64& rng) {
  TorusConfiguration cfg;
  cfg.n = n;
  cplx s0 = draw_non_singular_s0(rng, n);
  cfg.s0 = s0;
  double re = s0.real();
  std::size_t un = static_cast<std::size_t>(n);
  cfg.x0.resize(un);
  cfg.y0.resize(un);
  if (family == 1 || family == 2) {
    // product factor active on one family of variables
    bool on_x = family == 1;
    for (int att = 0;; ++att) {
      if (att > 5000) throw ComputeError("lemma1: product draw failed");
      cplx prod(1.0, 0.0);
      std::vector<cplx> v(un);
      for (std::size_t j = 0; j + 1 < un; ++j) {
        v[j] = std::polar(1.0, rng.angle());
        prod *= v[j];
      }
      v[un - 1] = std::conj(prod);
      bool ok = true;
      for (const cplx& z : v)
        if (std::abs(2.0 * re - z.real()) > 0.995) ok = false;
      if (!ok) continue;
      if (on_x)
        cfg.x0 = v;
      else
        cfg.y0 = v;
      break;
    }
    for (std::size_t j = 0; j < un; ++j) {
      if (on_x)
        cfg.y0[j] = matching_y(re, cfg.x0[j], rng);
      else
        cfg.x0[j] = matching_y(re, cfg.y0[j], rng);
    }
    return cfg;
  }
  if (family == 3) {
    // inverse pair: activates the (1,2) pair factor
    cfg.x0[0] = draw_feasible_unit(re, rng);
    cfg.x0[1] = std::conj(cfg.x0[0]);
    for (std::size_t j = 2; j < un; ++j) cfg.x0[j] = draw_feasible_unit(re, rng);
    for (std::size_t j = 0; j < un; ++j) cfg.y0[j] = matching_y(re, cfg.x0[j], rng);
    return cfg;
  }
  // family 0: only the per-index factors
  for (std::size_t j = 0; j < un; ++j) {
    cfg.x0[j] = draw_feasible_unit(re, rng);
    cfg.y0[j] = matching_y(re, cfg.x0[j], rng);
  }
  return cfg;
}

// Witness configurations sitting exactly on a singular point: every root
// pattern forces the origin into the hull.
TorusConfiguration make_type_b(int n, int pattern) {
  TorusConfiguration cfg;
  cfg.n = n;
  std::size_t un = static_cast<std::size_t>(n);
  cfg.x0.resize(un);
  cfg.y0.resize(un);
  if (n == 4) {
    if (pattern == 0) {
      // both families on the same fourth root below the axis
      std::fill(cfg.x0.begin(), cfg.x0.end(), cplx(0.0, -1.0));
      std::fill(cfg.y0.begin(), cfg.y0.end(), cplx(0.0, -1.0));
      cfg.s0 = cplx(0.0, 1.0);
    } else {
      double ysign = pattern == 1 ? 1.0 : -1.0;
      std::fill(cfg.x0.begin(), cfg.x0.end(), cplx(0.0, -1.0));
      std::fill(cfg.y0.begin(), cfg.y0.end(), cplx(ysign, 0.0));
      double re = 0.5 * ysign;
      cfg.s0 = cplx(re, std::sqrt(1.0 - re * re));
    }
    return cfg;
  }
  // n == 2: the second roots are real, so the witness patterns degenerate
  // to zero sign-vectors; containment is immediate.
  double xsign = pattern == 0 ? 1.0 : -1.0;
  std::fill(cfg.x0.begin(), cfg.x0.end(), cplx(xsign, 0.0));
  std::fill(cfg.y0.begin(), cfg.y0.end(), cplx(-1.0, 0.0));
  double re = 0.5 * (xsign - 1.0);
  cfg.s0 = cplx(re, std::sqrt(std::max(0.0, 1.0 - re * re)));
  return cfg;
}

} // namespace

LemmaOneReport lemma1_randomized_verify(int n, int trials, std::uint64_t seed,
                                        int threads) {
  if (n != 2 && n != 4)
    throw ValidationError("lemma1_randomized_verify: n must be 2 or 4");
  if (trials < 1)
    throw ValidationError("lemma1_randomized_verify: trials must be >= 1");

  struct TrialOut {
    bool sep_ok = false;
    bool cont_ok = false;
    double delta = 0.0;
    double resid = 0.0;
    std::string fail;
  };
  std::vector<TrialOut> out(static_cast<std::size_t>(trials));
  int b_patterns = n == 4 ? 3 : 2;

  parallel_index(static_cast<std::size_t>(trials), threads, [&](std::size_t t) {
    TrialOut& r = out[t];
    SplitMix64 rng(substream(seed, static_cast<std::uint64_t>(t)));
    TorusConfiguration a = make_type_a(n, static_cast<int>(t % 4), rng);
    HullVectors va = active_vectors(a);
    if (va.vecs.empty()) {
      r.fail = dump_config(a, "empty active set");
    } else {
      HullCertificate ca = hull_distance(va);
      if (ca.kind == HullCertificate::Kind::Separation) {
        r.sep_ok = true;
        r.delta = ca.margin;
      } else {
        r.fail = dump_config(a, ca.kind == HullCertificate::Kind::Containment
                                    ? "unexpected containment"
                                    : "indeterminate");
      }
    }
    TorusConfiguration b = make_type_b(n, static_cast<int>(t) % b_patterns);
    HullCertificate cb = hull_distance(active_vectors(b));
    if (cb.kind == HullCertificate::Kind::Containment) {
      r.cont_ok = true;
      r.resid = cb.residual;
    } else {
      if (!r.fail.empty()) r.fail += "; ";
      r.fail += dump_config(b, "witness not contained");
    }
  });

  LemmaOneReport rep;
  rep.n = n;
  rep.trials = trials;
  rep.min_delta = std::numeric_limits<double>::infinity();
  for (const TrialOut& r : out) {
    if (r.sep_ok) {
      ++rep.separations;
      rep.min_delta = std::min(rep.min_delta, r.delta);
    }
    if (r.cont_ok) {
      ++rep.containments;
      rep.max_residual = std::max(rep.max_residual, r.resid);
    }
    if (!r.fail.empty()) {
      rep.failures.push_back(r.fail);
      if (r.fail.find("indeterminate") != std::string::npos)
        ++rep.indeterminate;
    }
  }
  if (rep.separations == 0) rep.min_delta = 0.0;
  return rep;
}

RatioReport ratio_monotonicity_check(double s0_re, int samples) {
  if (s0_re == 0.0)
    throw ValidationError("ratio_monotonicity_check: real part must be nonzero");
  if (std::abs(s0_re) >= 1.0)
    throw ValidationError("ratio_monotonicity_check: level set empty");
  if (samples < 3)
    throw ValidationError("ratio_monotonicity_check: need at least 3 samples");
  double lo, hi;
  if (s0_re > 0.0) {
    lo = -std::acos(2.0 * s0_re - 1.0);
    hi = 0.0;
  } else {
    lo = -pi;
    hi = -std::acos(2.0 * s0_re + 1.0);
  }
  RatioReport rep;
  rep.s0_re = s0_re;
  double h = (hi - lo) / (samples + 1);
  for (int i = 1; i <= samples; ++i) {
    double th = lo + h * i;
    double c = 2.0 * s0_re - std::cos(th);
    double ph = -std::acos(c);
    rep.theta.push_back(th);
    rep.ratio.push_back(std::sin(th) / std::sin(ph));
  }
  rep.strictly_decreasing = rep.strictly_increasing = true;
  for (std::size_t i = 1; i < rep.ratio.size(); ++i) {
    if (rep.ratio[i] >= rep.ratio[i - 1]) rep.strictly_decreasing = false;
    if (rep.ratio[i] <= rep.ratio[i - 1]) rep.strictly_increasing = false;
  }
  rep.ok = s0_re > 0.0 ? rep.strictly_decreasing : rep.strictly_increasing;
  return rep;
}

} // namespace isinglab
