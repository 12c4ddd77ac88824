#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geoscatter/types.hpp"

namespace geoscatter {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Invalid configuration or argument (CLI exit code 2).
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error("config", line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Numerical failures (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DomainError : public NumericalError {
 public:
  explicit DomainError(const std::string& what) : NumericalError("domain", what) {}
};

class ConvexityError : public NumericalError {
 public:
  ConvexityError(double s, double second_ff)
      : NumericalError("convexity", "boundary not strictly convex at arclength s=" +
                                        std::to_string(s) +
                                        " (II=" + std::to_string(second_ff) + ")"),
        s_(s), second_ff_(second_ff) {}
  double arclength() const noexcept { return s_; }
  double second_ff() const noexcept { return second_ff_; }

 private:
  double s_;
  double second_ff_;
};

class FocalRadiusError : public NumericalError {
 public:
  FocalRadiusError(double r, double s)
      : NumericalError("focal-radius", "normal geodesics cross at r=" + std::to_string(r) +
                                           ", s=" + std::to_string(s) +
                                           "; use a smaller collar width"),
        r_(r) {}
  double depth() const noexcept { return r_; }

 private:
  double r_;
};

class StiffnessError : public NumericalError {
 public:
  explicit StiffnessError(double t)
      : NumericalError("stiffness", "step size underflow at t=" + std::to_string(t)) {}
};

/// A ray that never reaches the boundary. Carries whatever was integrated
/// before the time limit.
class TrappedError : public NumericalError {
 public:
  TrappedError(const std::string& what, double partial)
      : NumericalError("trapped", what), partial_(partial) {}
  double partial_integral() const noexcept { return partial_; }

 private:
  double partial_;
};

class ResolutionError : public NumericalError {
 public:
  explicit ResolutionError(const std::string& what) : NumericalError("resolution", what) {}
};

class CoverageError : public NumericalError {
 public:
  explicit CoverageError(const std::string& what) : NumericalError("coverage", what) {}
};

class ConvergenceError : public NumericalError {
 public:
  explicit ConvergenceError(const std::string& what) : NumericalError("convergence", what) {}
};

class LayoutError : public NumericalError {
 public:
  explicit LayoutError(const std::string& what) : NumericalError("layout", what) {}
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : NumericalError("solver", what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

class AmbiguityError : public NumericalError {
 public:
  AmbiguityError(const std::string& what, std::vector<Vec2> candidates)
      : NumericalError("ambiguity", what), candidates_(std::move(candidates)) {}
  const std::vector<Vec2>& candidates() const noexcept { return candidates_; }

 private:
  std::vector<Vec2> candidates_;
};

/// A checked property did not hold (CLI exit code 4). `witness` names the
/// offending sample.
class PropertyFailure : public Error {
 public:
  PropertyFailure(const std::string& what, std::string witness)
      : Error("property", what + " [witness: " + witness + "]"), witness_(std::move(witness)) {}
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

} // namespace geoscatter
