#pragma once

#include <stdexcept>
#include <string>

namespace hyperpart {

// Base class for all library errors. The CLI maps the subclasses onto exit
// codes: InvalidArgument -> 2, DataError/SizeError -> 3, ConvergenceError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by the caller (bad order, k > n, sigma <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or out-of-contract input data (file contents, model parameters).
class DataError : public Error {
 public:
  using Error::Error;
};

// Input exceeds a documented size cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace hyperpart
