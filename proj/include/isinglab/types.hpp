#pragma once

#include <complex>
#include <numbers>

namespace isinglab {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

} // namespace isinglab
