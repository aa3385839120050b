#pragma once

#include <stdexcept>
#include <string>

namespace mollify {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// An objective returned a non-finite value, or an update produced one.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Every importance weight underflowed even after max-shifting.
class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

/// The requested ESS target cannot be reached for the given losses.
class InfeasibleTargetError : public Error {
 public:
  using Error::Error;
};

/// Requested dimension not supported (quadrature oracles cover d <= 3).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries a 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace mollify
