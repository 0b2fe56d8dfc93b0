#pragma once

#include <stdexcept>
#include <string>

namespace fotex {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Kelvin-Mandel matrix violates the redundancy relations of a
/// completely symmetric tensor.
class NotCompletelySymmetric : public Error {
 public:
  NotCompletelySymmetric(double worst_residual)
      : Error("matrix is not completely symmetric (worst redundancy residual " +
              std::to_string(worst_residual) + ")"),
        worst_residual_(worst_residual) {}
  double worst_residual() const noexcept { return worst_residual_; }

 private:
  double worst_residual_;
};

class EmptyMeasure : public Error {
 public:
  EmptyMeasure() : Error("fiber measure has no atoms") {}
};

class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

/// lambda1 >= lambda2 >= 1 - lambda1 - lambda2 >= 0 does not hold.
class OrderingViolation : public Error {
 public:
  using Error::Error;
};

class NotCandidate : public Error {
 public:
  using Error::Error;
};

class NullSpaceNotFound : public Error {
 public:
  using Error::Error;
};

/// Raised when an SDP solve does not end with status Optimal.
class SolverError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace fotex
