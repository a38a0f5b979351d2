#include "isinglab/kernels.hpp"

#include <atomic>

#include "isinglab/errors.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define ISL_X86 1
#include <immintrin.h>
#else
#define ISL_X86 0
#endif

namespace isinglab {

namespace {

std::atomic<SimdMode> g_mode{SimdMode::Auto};

bool detect_avx2() {
#if ISL_X86 && defined(__GNUC__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool use_avx2() {
  SimdMode m = g_mode.load(std::memory_order_relaxed);
  if (m == SimdMode::Scalar) return false;
  static const bool supported = detect_avx2();
  return supported;
}

// Scalar complex arithmetic on explicit re/im pairs.  std::complex division
// goes through the scaled libm routine; the unscaled form below matches the
// vector backend and is safe here because every operand is O(1).
struct c2 {
  double re, im;
};

inline c2 mul(c2 a, c2 b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline c2 sub(c2 a, c2 b) { return {a.re - b.re, a.im - b.im}; }
inline c2 add(c2 a, c2 b) { return {a.re + b.re, a.im + b.im}; }
inline c2 div(c2 a, c2 b) {
  double d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline c2 ld(const cplx& z) { return {z.real(), z.imag()}; }
inline cplx st(c2 z) { return {z.re, z.im}; }

cplx kdot_cc_scalar(const cplx* a, const cplx* b, std::size_t n) {
  c2 acc{0, 0};
  for (std::size_t i = 0; i < n; ++i) acc = add(acc, mul(ld(a[i]), ld(b[i])));
  return st(acc);
}

cplx kdot_rc_scalar(const double* a, const cplx* b, std::size_t n) {
  double re = 0, im = 0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i] * b[i].real();
    im += a[i] * b[i].imag();
  }
  return {re, im};
}

cplx kdot_rrrc_scalar(const double* a, const double* b, const double* c,
                      const cplx* w, std::size_t n) {
  double re = 0, im = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = a[i] * b[i] * c[i];
    re += f * w[i].real();
    im += f * w[i].imag();
  }
  return {re, im};
}

cplx kdot_cccc_scalar(const cplx* a, const cplx* b, const cplx* c,
                      const cplx* d, std::size_t n) {
  c2 acc{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    c2 p = mul(mul(ld(a[i]), ld(b[i])), mul(ld(c[i]), ld(d[i])));
    acc = add(acc, p);
  }
  return st(acc);
}

cplx chi2_pair_row_scalar(cplx x1z, cplx E1z, cplx iS1z, const cplx* x,
                          const cplx* E, const cplx* iS, std::size_t n) {
  c2 x1 = ld(x1z), E1 = ld(E1z);
  c2 f1 = mul(ld(iS1z), E1); // E1 / sinh(g1), hoisted
  c2 acc{0, 0};
  const c2 one{1, 0};
  for (std::size_t i = 0; i < n; ++i) {
    c2 xi = ld(x[i]), Ei = ld(E[i]);
    c2 cx = sub(one, mul(x1, xi));
    c2 cE = sub(one, mul(E1, Ei));
    c2 den = mul(cx, cE);
    c2 num = mul(mul(sub(x1, xi), sub(E1, Ei)), mul(Ei, ld(iS[i])));
    c2 q = div(num, mul(den, den));
    acc = add(acc, q);
  }
  return st(mul(f1, acc));
}

#if ISL_X86

// AVX2 layout: one __m256d holds two complex doubles [re0 im0 re1 im1].

__attribute__((target("avx2,fma"))) inline __m256d vcmul(__m256d a, __m256d b) {
  __m256d br = _mm256_movedup_pd(b);      // [br0 br0 br1 br1]
  __m256d bi = _mm256_permute_pd(b, 0xF); // [bi0 bi0 bi1 bi1]
  __m256d asw = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(asw, bi));
}

__attribute__((target("avx2,fma"))) inline __m256d vcdiv(__m256d a, __m256d b) {
  __m256d num = vcmul(a, _mm256_xor_pd(b, _mm256_set_pd(-0.0, 0.0, -0.0, 0.0)));
  __m256d b2 = _mm256_mul_pd(b, b);
  __m256d d = _mm256_hadd_pd(b2, b2); // [|b0|^2 |b0|^2 |b1|^2 |b1|^2]
  return _mm256_div_pd(num, d);
}

__attribute__((target("avx2,fma"))) inline cplx vreduce(__m256d acc) {
  __m128d lo = _mm256_castpd256_pd128(acc);
  __m128d hi = _mm256_extractf128_pd(acc, 1);
  __m128d s = _mm_add_pd(lo, hi);
  alignas(16) double out[2];
  _mm_store_pd(out, s);
  return {out[0], out[1]};
}

__attribute__((target("avx2,fma"))) cplx kdot_cc_avx2(const cplx* a,
                                                      const cplx* b,
                                                      std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    acc = _mm256_add_pd(acc, vcmul(va, vb));
  }
  cplx tail(0, 0);
  for (; i < n; ++i) tail += st(mul(ld(a[i]), ld(b[i])));
  return vreduce(acc) + tail;
}

__attribute__((target("avx2,fma"))) cplx kdot_rc_avx2(const double* a,
                                                      const cplx* b,
                                                      std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pb = reinterpret_cast<const double*>(b);
  for (; i + 2 <= n; i += 2) {
    __m256d w = _mm256_set_pd(a[i + 1], a[i + 1], a[i], a[i]);
    acc = _mm256_fmadd_pd(w, _mm256_loadu_pd(pb + 2 * i), acc);
  }
  cplx tail(0, 0);
  for (; i < n; ++i) tail += a[i] * b[i];
  return vreduce(acc) + tail;
}

__attribute__((target("avx2,fma"))) cplx kdot_rrrc_avx2(const double* a,
                                                        const double* b,
                                                        const double* c,
                                                        const cplx* w,
                                                        std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pw = reinterpret_cast<const double*>(w);
  for (; i + 2 <= n; i += 2) {
    double f0 = a[i] * b[i] * c[i];
    double f1 = a[i + 1] * b[i + 1] * c[i + 1];
    __m256d f = _mm256_set_pd(f1, f1, f0, f0);
    acc = _mm256_fmadd_pd(f, _mm256_loadu_pd(pw + 2 * i), acc);
  }
  cplx tail(0, 0);
  for (; i < n; ++i) tail += a[i] * b[i] * c[i] * w[i];
  return vreduce(acc) + tail;
}

__attribute__((target("avx2,fma"))) cplx kdot_cccc_avx2(const cplx* a,
                                                        const cplx* b,
                                                        const cplx* c,
                                                        const cplx* d,
                                                        std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* pa = reinterpret_cast<const double*>(a);
  const double* pb = reinterpret_cast<const double*>(b);
  const double* pc = reinterpret_cast<const double*>(c);
  const double* pd = reinterpret_cast<const double*>(d);
  for (; i + 2 <= n; i += 2) {
    __m256d p = vcmul(_mm256_loadu_pd(pa + 2 * i), _mm256_loadu_pd(pb + 2 * i));
    __m256d q = vcmul(_mm256_loadu_pd(pc + 2 * i), _mm256_loadu_pd(pd + 2 * i));
    acc = _mm256_add_pd(acc, vcmul(p, q));
  }
  cplx tail(0, 0);
  for (; i < n; ++i)
    tail += st(mul(mul(ld(a[i]), ld(b[i])), mul(ld(c[i]), ld(d[i]))));
  return vreduce(acc) + tail;
}

__attribute__((target("avx2,fma"))) cplx chi2_pair_row_avx2(
    cplx x1z, cplx E1z, cplx iS1z, const cplx* x, const cplx* E,
    const cplx* iS, std::size_t n) {
  __m256d x1 = _mm256_set_pd(x1z.imag(), x1z.real(), x1z.imag(), x1z.real());
  __m256d E1 = _mm256_set_pd(E1z.imag(), E1z.real(), E1z.imag(), E1z.real());
  __m256d one = _mm256_set_pd(0.0, 1.0, 0.0, 1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  const double* px = reinterpret_cast<const double*>(x);
  const double* pE = reinterpret_cast<const double*>(E);
  const double* pS = reinterpret_cast<const double*>(iS);
  for (; i + 2 <= n; i += 2) {
    __m256d xi = _mm256_loadu_pd(px + 2 * i);
    __m256d Ei = _mm256_loadu_pd(pE + 2 * i);
    __m256d Si = _mm256_loadu_pd(pS + 2 * i);
    __m256d cx = _mm256_sub_pd(one, vcmul(x1, xi));
    __m256d cE = _mm256_sub_pd(one, vcmul(E1, Ei));
    __m256d den = vcmul(cx, cE);
    __m256d num = vcmul(vcmul(_mm256_sub_pd(x1, xi), _mm256_sub_pd(E1, Ei)),
                        vcmul(Ei, Si));
    acc = _mm256_add_pd(acc, vcdiv(num, vcmul(den, den)));
  }
  cplx tail(0, 0);
  {
    c2 x1s = ld(x1z), E1s = ld(E1z);
    const c2 ones{1, 0};
    for (; i < n; ++i) {
      c2 xi = ld(x[i]), Ei = ld(E[i]);
      c2 cx = sub(ones, mul(x1s, xi));
      c2 cE = sub(ones, mul(E1s, Ei));
      c2 den = mul(cx, cE);
      c2 num = mul(mul(sub(x1s, xi), sub(E1s, Ei)), mul(Ei, ld(iS[i])));
      tail += st(div(num, mul(den, den)));
    }
  }
  cplx f1 = iS1z * E1z;
  return f1 * (vreduce(acc) + tail);
}

#endif // ISL_X86

} // namespace

void set_simd_mode(SimdMode mode) {
  if (mode == SimdMode::Avx2 && !detect_avx2())
    throw ValidationError("set_simd_mode: avx2 requested but not supported here");
  g_mode.store(mode, std::memory_order_relaxed);
}

SimdMode simd_mode() { return g_mode.load(std::memory_order_relaxed); }

bool simd_avx2_supported() { return detect_avx2(); }

std::string simd_backend_name() { return use_avx2() ? "avx2" : "scalar"; }

#if ISL_X86
#define ISL_DISPATCH(fn, ...) \
  return use_avx2() ? fn##_avx2(__VA_ARGS__) : fn##_scalar(__VA_ARGS__)
#else
#define ISL_DISPATCH(fn, ...) return fn##_scalar(__VA_ARGS__)
#endif

cplx kdot_cc(const cplx* a, const cplx* b, std::size_t n) {
  ISL_DISPATCH(kdot_cc, a, b, n);
}

cplx kdot_rc(const double* a, const cplx* b, std::size_t n) {
  ISL_DISPATCH(kdot_rc, a, b, n);
}

cplx kdot_rrrc(const double* a, const double* b, const double* c,
               const cplx* w, std::size_t n) {
  ISL_DISPATCH(kdot_rrrc, a, b, c, w, n);
}

cplx kdot_cccc(const cplx* a, const cplx* b, const cplx* c, const cplx* d,
               std::size_t n) {
  ISL_DISPATCH(kdot_cccc, a, b, c, d, n);
}

cplx chi2_pair_row(cplx x1, cplx E1, cplx iS1, const cplx* x, const cplx* E,
                   const cplx* iS, std::size_t n) {
  ISL_DISPATCH(chi2_pair_row, x1, E1, iS1, x, E, iS, n);
}

} // namespace isinglab
