#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qsylv {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  SingularMatrix(const std::string& what, long long pivot)
      : Error(what + " (pivot " + std::to_string(pivot) + ")"), pivot(pivot) {}
  long long pivot;
};

struct NumericalFailure : Error {
  using Error::Error;
};

struct ConvergenceFailure : Error {
  ConvergenceFailure(const std::string& what, double last_increment, std::vector<double> history = {})
      : Error(what), last_increment(last_increment), history(std::move(history)) {}
  double last_increment;
  std::vector<double> history;
};

struct DivergenceError : Error {
  DivergenceError(const std::string& what, double ratio) : Error(what), ratio(ratio) {}
  double ratio;
};

struct FormatError : Error {
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " at byte " + std::to_string(offset)), offset(offset) {}
  std::size_t offset;
};

}  // namespace qsylv
