#pragma once

#include <stdexcept>
#include <string>

namespace symchi {

/// Robust location/scale estimation received a sample whose MAD is zero.
class DegenerateScaleError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The regression design matrix is rank deficient.
class SingularDesignError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A bracketing root finder found no sign change after full expansion.
class NoRootError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The inputs do not determine a solution (e.g. all counts in one cell).
class IllPosedError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numeric routine could not reach its requested tolerance.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}

  /// Tolerance actually attained when the routine gave up.
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Malformed input file; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, long line = 0)
      : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Wraps a pipeline failure with the stage that produced it.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(stage) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace symchi
