#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace protopal {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing column, unknown feature name, or an invalid schema definition.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A cohort row that violates a feature domain.
class ValidationError : public Error {
 public:
  ValidationError(std::size_t row, std::string feature, const std::string& what)
      : Error("row " + std::to_string(row) + ", feature '" + feature + "': " + what),
        row_(row),
        feature_(std::move(feature)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& feature() const noexcept { return feature_; }

 private:
  std::size_t row_;
  std::string feature_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DegenerateBasisError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class InterventionError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class BundleError : public Error {
 public:
  using Error::Error;
};

}  // namespace protopal
