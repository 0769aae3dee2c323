#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sclab {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions or ill-formed multi-indices.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Requested Fock space exceeds the configured memory budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Truncated state carries more mass above the cutoff than allowed.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int required_nmax)
      : Error(what), required_nmax_(required_nmax) {}
  int required_nmax() const noexcept { return required_nmax_; }

 private:
  int required_nmax_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// A series or weight is outside the domain where it converges.
class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// Two closed forms of the same quantity disagree.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Numerical integration failed (blow-up, non-finite values, no contraction).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sclab
