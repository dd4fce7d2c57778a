#pragma once

#include <stdexcept>
#include <string>

namespace srn {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : ModelError {
  ParseError(int line, int column, const std::string& what)
      : ModelError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line(line), column(column) {}
  int line;
  int column;
};

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InfeasibleTolerance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientSamples : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace srn
