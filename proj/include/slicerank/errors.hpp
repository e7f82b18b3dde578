#pragma once

#include <stdexcept>
#include <string>

namespace slicerank {

/// Input record is missing a required field or has the wrong JSON type.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value is outside its admissible domain (e.g. label not in 1..5).
class RangeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid curriculum configuration or a batch too small for the requested stage.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A completion/reward file does not cover the expected grid.
class ShapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Correlation requested over fewer than two points or constant input.
class UndefinedCorrelation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke a documented precondition.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace slicerank
