#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sladr {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or configuration text.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Query point lies outside a non-periodic discrete domain.
class OutsideDomain : public Error {
 public:
  using Error::Error;
};

/// An iterative solve (trajectory fixed point, reaction Newton) failed.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::size_t dof, double residual)
      : Error(what), dof_(dof), residual_(residual) {}
  std::size_t dof() const { return dof_; }
  double residual() const { return residual_; }

 private:
  std::size_t dof_;
  double residual_;
};

/// Explicit time step violates the stability restriction of the scheme.
class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double admissible_dt)
      : Error(what), admissible_dt_(admissible_dt) {}
  double admissible_dt() const { return admissible_dt_; }

 private:
  double admissible_dt_;
};

}  // namespace sladr
