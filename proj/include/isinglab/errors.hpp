#pragma once

#include <stdexcept>
#include <string>

namespace isinglab {

// Bad input: out-of-domain arguments, malformed config. CLI exit code 2.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A computation could not certify its result. CLI exit code 3.
class ComputeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NoValidRadius : public ComputeError {
public:
  using ComputeError::ComputeError;
};

class BudgetExceeded : public ComputeError {
public:
  using ComputeError::ComputeError;
};

class IllConditioned : public ComputeError {
public:
  using ComputeError::ComputeError;
};

class NearCriticality : public ComputeError {
public:
  using ComputeError::ComputeError;
};

class InvalidGrid : public ValidationError {
public:
  using ValidationError::ValidationError;
};

} // namespace isinglab
