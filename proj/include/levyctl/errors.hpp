#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace levyctl {

/// Invalid model, problem or config input. Maps to CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A required assumption does not hold (e.g. infinite mean, divergent Psi).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Numerical procedure failed: repeated roots, bracketing failure, quadrature.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegeneracyError : public SolverError {
 public:
  using SolverError::SolverError;
};

class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : SolverError(what + " (achieved " + format(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  static std::string format(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
  }
  double achieved_;
};

}  // namespace levyctl
