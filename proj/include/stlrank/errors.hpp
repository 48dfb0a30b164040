#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stlrank {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A formula or expression refers to something the trace set cannot provide,
/// or was constructed with invalid pieces (e.g. a singular interval).
class SpecificationError : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested at a time that is not a sample time.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid or missing property parameter; `field()` names the culprit.
class ParameterError : public Error {
 public:
  ParameterError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct SourceSpan {
  std::size_t start_offset = 0;
  std::size_t end_offset = 0;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, SourceSpan span, std::vector<std::string> expected = {})
      : Error(message), span_(span), expected_(std::move(expected)) {}

  SourceSpan span() const noexcept { return span_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  SourceSpan span_;
  std::vector<std::string> expected_;
};

/// Malformed dataset content. `row()` is the 1-based line (0 when the error
/// is not tied to a row), `column()` the offending field name.
class SchemaError : public Error {
 public:
  SchemaError(std::size_t row, std::string column, const std::string& message)
      : Error(describe(row, column, message)), row_(row), column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  static std::string describe(std::size_t row, const std::string& column, const std::string& message) {
    std::string out;
    if (row != 0) out += "row " + std::to_string(row) + ": ";
    if (!column.empty()) out += "column '" + column + "': ";
    return out + message;
  }

  std::size_t row_;
  std::string column_;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace stlrank
