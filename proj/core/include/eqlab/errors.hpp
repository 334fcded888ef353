#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eqlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class InhomogeneousError : public Error {
 public:
  InhomogeneousError(int degree_a, int degree_b)
      : Error("inhomogeneous polynomial: terms of degree " + std::to_string(degree_a) + " and " +
              std::to_string(degree_b)),
        degree_a_(degree_a),
        degree_b_(degree_b) {}
  int degree_a() const noexcept { return degree_a_; }
  int degree_b() const noexcept { return degree_b_; }

 private:
  int degree_a_;
  int degree_b_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ZeroMapError : public Error {
 public:
  using Error::Error;
};

class ZeroPolynomialError : public Error {
 public:
  using Error::Error;
};

class CoincidentPointsError : public Error {
 public:
  using Error::Error;
};

/// The two polynomials share a factor of positive degree.
class CommonFactorError : public Error {
 public:
  using Error::Error;
};

/// Numerical back-substitution stayed ambiguous after all frame retries.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Target point whose fiber is deficient or positive-dimensional.
class ExceptionalPointError : public Error {
 public:
  using Error::Error;
};

class IndeterminacyError : public Error {
 public:
  using Error::Error;
};

class InconsistentDegreeError : public Error {
 public:
  using Error::Error;
};

class CostGuardError : public Error {
 public:
  using Error::Error;
};

class DegenerateLineError : public Error {
 public:
  using Error::Error;
};

/// Operation not available for the given representation (e.g. lazy zero sets).
class ContractError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& key_path, const std::string& what)
      : Error("config error at '" + key_path + "': " + what), key_path_(key_path) {}
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace eqlab
