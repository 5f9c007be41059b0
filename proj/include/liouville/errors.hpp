#pragma once

#include <stdexcept>
#include <string>

namespace liouville {

// Argument outside the domain of an operation (bad index, |z| > 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation at a pole of a closed-form expression.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Right-hand side fails the solvability condition of a resonant mode.
class ResonanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A double zero of a profile or a non-simple zero where simplicity is needed.
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Discretization too coarse for the requested truncation.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Problem setup violates a hypothesis of the method (kernel dimension ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Refinement did not agree with the base computation within tolerance.
class PrecisionError : public std::runtime_error {
 public:
  PrecisionError(const std::string& what, double coarse, double fine)
      : std::runtime_error(what), coarse_(coarse), fine_(fine) {}
  double coarse() const { return coarse_; }
  double fine() const { return fine_; }

 private:
  double coarse_;
  double fine_;
};

// Newton iteration failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace liouville
