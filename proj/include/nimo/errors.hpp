#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nimo {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatchError : Error {
  using Error::Error;
};

/// A matrix expected to be symmetric positive definite was not, even after
/// jitter escalation.
struct NotSpdError : Error {
  using Error::Error;
};

/// A column had zero variance and cannot be standardized.
struct ConstantColumnError : Error {
  explicit ConstantColumnError(std::size_t column)
      : Error("column " + std::to_string(column) + " is constant; cannot standardize"),
        column(column) {}
  std::size_t column;
};

/// NaN or infinity encountered where finite values are required.
struct NonFiniteError : Error {
  using Error::Error;
};

struct IndexOutOfRangeError : Error {
  using Error::Error;
};

/// Training produced a non-finite loss.
struct DivergedError : Error {
  using Error::Error;
};

/// An iterative solver hit its iteration cap before reaching tolerance.
struct MaxIterationsError : Error {
  using Error::Error;
};

/// A backward pass was handed caches that do not match the forward call.
struct StaleCacheError : Error {
  using Error::Error;
};

struct UnknownSettingError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : Error("parse error at row " + std::to_string(row) + ", column " +
              std::to_string(col) + ": " + what),
        row(row),
        col(col) {}
  std::size_t row;
  std::size_t col;
};

struct MissingColumnError : Error {
  using Error::Error;
};

struct InsufficientRowsError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

struct UnknownTableRowError : Error {
  using Error::Error;
};

}  // namespace nimo
