#pragma once

#include <string>

#include "isinglab/types.hpp"

namespace isinglab {

// Two-point function estimate with provenance: which evaluation route
// produced it and how trustworthy it is.
struct CorrelationResult {
  int M = 0;
  int N = 0;
  cplx value{0.0, 0.0};
  double err_est = 0.0;
  std::string method;
};

} // namespace isinglab
