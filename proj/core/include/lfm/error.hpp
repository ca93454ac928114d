// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lfm {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input, configuration, or file contents. The CLI maps these to exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value. The CLI maps these to exit code 2.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ValidationError {
 public:
  DimensionError(const std::string& what, long expected, long actual)
      : ValidationError(what + ": expected dimension " + std::to_string(expected) +
                        ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  long expected() const noexcept { return expected_; }
  long actual() const noexcept { return actual_; }

 private:
  long expected_;
  long actual_;
};

/// CSV parse failure. Row and column are zero-based indices into the file
/// (header row included); column is -1 when the whole row is at fault.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, long row, long column)
      : ValidationError(what + " (row " + std::to_string(row) +
                        (column >= 0 ? ", column " + std::to_string(column) : std::string{}) + ")"),
        row_(row),
        column_(column) {}

  long row() const noexcept { return row_; }
  long column() const noexcept { return column_; }

 private:
  long row_;
  long column_;
};

class CheckpointError : public ValidationError {
 public:
  enum class Kind : std::uint8_t { bad_magic, version_mismatch, crc_mismatch, truncated, malformed, io };

  CheckpointError(Kind kind, const std::string& what) : ValidationError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace lfm
