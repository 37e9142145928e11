#pragma once

#include <stdexcept>
#include <string>

namespace gfchain {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters or inconsistent inputs (bad grid, mismatched tables).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of an operation (e.g. y < x/2 for the tail).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The rate ratio could not be evaluated (non-finite value, off-grid query
// on a tabulated model, singular at the origin).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gfchain
