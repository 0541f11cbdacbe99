#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace csrgame {

/// Parameter or scenario validation failure. Carries every violated
/// invariant, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems);

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Scenario text that does not parse. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, std::string field = {});

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

/// Numerical failures of the equilibrium solvers.
class SolverError : public std::runtime_error {
 public:
  enum class Kind {
    kUndeterminedControls,
    kSingularSweepStep,
    kSingularSystem,
    kInconsistentTrajectory,
  };

  /// `period` is the 1-based time index of the failure, 0 when global.
  SolverError(Kind kind, const std::string& message, int period = 0);

  Kind kind() const { return kind_; }
  int period() const { return period_; }

 private:
  Kind kind_;
  int period_;
};

}  // namespace csrgame
