#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace stabman {

/// Six significant digits, for error messages.
inline std::string format_number(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not match the declared model dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument violates an operation's precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what + " (last residual " + format_number(last_residual) + ")"),
        last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// A Newton Jacobian is numerically singular.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The model is outside the supported class (e.g. singular Phi).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

/// Failure of the first-order model at some state, e.g. the implicit
/// next-period solve diverged.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Common base for saddle-path structure failures.
class SpectralError : public Error {
 public:
  using Error::Error;
};

class UnitRootError : public SpectralError {
 public:
  using SpectralError::SpectralError;
};

class BlanchardKahnError : public SpectralError {
 public:
  BlanchardKahnError(int stable_found, int stable_required)
      : SpectralError("Blanchard-Kahn condition violated: found " + std::to_string(stable_found) +
                      " stable eigenvalues, require " + std::to_string(stable_required)),
        found_(stable_found),
        required_(stable_required) {}
  int found() const { return found_; }
  int required() const { return required_; }

 private:
  int found_;
  int required_;
};

/// The transformed system does not vanish to first order at the origin.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Picard iteration for a policy fixed point did not contract.
class NonContractionError : public ConvergenceError {
 public:
  NonContractionError(const std::string& what, double last_residual, int order)
      : ConvergenceError(what, last_residual), order_(order) {}
  int order() const { return order_; }

 private:
  int order_;
};

/// No transformed initial condition reproduces the requested (x0, z0).
class InfeasibleInitialError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace stabman
