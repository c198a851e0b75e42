#pragma once

#include <stdexcept>
#include <string>

namespace edlab {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Probability assignments that cannot all hold at once.
class InconsistencyError : public Error {
 public:
  using Error::Error;
};

// Zero total evidence probability; the posterior does not exist.
class UndefinedPosteriorError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Every node of a field is below the amplitude floor.
class DegenerateFieldError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Integrator parameters rejected before any stepping happens.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace edlab
