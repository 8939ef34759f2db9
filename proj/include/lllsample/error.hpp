#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lllsample {

/// Malformed input text. `line()` is 1-based; 0 when the error is not tied
/// to a line (e.g. a clause-count mismatch detected at end of input).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " +
                                           what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// The instance lies outside the parameter regime an operation needs.
class RegimeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A randomized construction ran out of its resampling budget.
class ConstructionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Brute-force enumeration refused because the state space is too large.
class GuardError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lllsample
