#pragma once

#include <stdexcept>
#include <string>

namespace nvr {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes (see exit_code_for).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration values or unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid function arguments (e.g. requesting more items than exist).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Tensor/image shapes that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Missing or inconsistent dataset content.
class DataError : public Error {
 public:
  using Error::Error;
};

// Corrupt or truncated binary file.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// Keypoint/skeleton definitions that disagree.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

// Checkpoint written by an incompatible configuration or format version.
class VersionError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf encountered in losses or learnable state.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

}  // namespace nvr
