#pragma once

#include <stdexcept>
#include <string>

namespace psoconv {

enum class ErrorKind {
  InsufficientKnots,
  InvalidKnots,
  NonFiniteInput,
  OutOfDomain,
  NoRefinementNeeded,
  DomainMismatch,
  DegenerateCoefficients,
  SingularMap,
  SingularInverse,
  NoConvergence,
  NoBracket,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

// Thrown by the stationary-distribution iteration when the budget runs out.
class NoConvergence : public Error {
public:
  NoConvergence(double last_residual, std::size_t iterations)
      : Error(ErrorKind::NoConvergence,
              "fixed point iteration stopped after " + std::to_string(iterations) +
                  " iterations with residual " + std::to_string(last_residual)),
        last_residual_(last_residual),
        iterations_(iterations) {}

  double last_residual() const { return last_residual_; }
  std::size_t iterations() const { return iterations_; }

private:
  double last_residual_;
  std::size_t iterations_;
};

}  // namespace psoconv
