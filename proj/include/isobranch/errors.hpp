#pragma once

#include <stdexcept>
#include <string>

namespace isobranch {

/// Argument outside the domain of a constitutive map (e.g. det F <= 0).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A quadrature point with non-positive det(A + grad u).
class InvertedElementError : public std::runtime_error {
public:
  InvertedElementError(int element, double lambda, double det);

  int element() const { return element_; }
  double lambda() const { return lambda_; }
  double det() const { return det_; }

private:
  int element_;
  double lambda_;
  double det_;
};

/// Numerically singular matrix; `pivot` is the offending column, or -1.
class SingularMatrixError : public std::runtime_error {
public:
  SingularMatrixError(const std::string& what, long pivot);

  long pivot() const { return pivot_; }

private:
  long pivot_;
};

/// Solution set of a degree computation is not regular.
class RegularValueError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double residual);

  double residual() const { return residual_; }

private:
  double residual_;
};

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A branch CSV whose header or rows do not match the frozen column set.
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace isobranch
