#pragma once

#include <cstddef>
#include <string>

#include "isinglab/types.hpp"

namespace isinglab {

// Inner-loop reductions for the quadrature engines.  Each kernel has a
// scalar reference implementation and, on x86-64 hardware with AVX2+FMA, a
// vectorized variant; which one runs is selected at process level.
//
// The two backends round differently (FMA, lane order), so results agree to
// ~1e-13 relative, not bitwise.  Within one backend every kernel is a pure
// function with a fixed summation order.

enum class SimdMode { Auto, Scalar, Avx2 };

// Process-wide selection; Auto resolves to the best supported backend.
void set_simd_mode(SimdMode mode);
SimdMode simd_mode();

// Backend that will actually execute ("scalar" or "avx2").
std::string simd_backend_name();
bool simd_avx2_supported();

// sum_i a[i] * b[i]
cplx kdot_cc(const cplx* a, const cplx* b, std::size_t n);

// sum_i a[i] * b[i], real weights
cplx kdot_rc(const double* a, const cplx* b, std::size_t n);

// sum_i a[i] * b[i] * c[i] * w[i], three real tables against a complex one
cplx kdot_rrrc(const double* a, const double* b, const double* c,
               const cplx* w, std::size_t n);

// sum_i a[i] * b[i] * c[i] * d[i]
cplx kdot_cccc(const cplx* a, const cplx* b, const cplx* c, const cplx* d,
               std::size_t n);

// Row reduction of the two-variable residue form: with per-node tables
// x, E = e^{-gamma(x)}, iS = 1/sinh(gamma(x)), accumulates over a2
//   (x1 - x[a2]) (E1 - E[a2]) E1 E[a2] iS1 iS[a2]
//   / ((1 - x1 x[a2])^2 (1 - E1 E[a2])^2).
cplx chi2_pair_row(cplx x1, cplx E1, cplx iS1, const cplx* x, const cplx* E,
                   const cplx* iS, std::size_t n);

} // namespace isinglab
