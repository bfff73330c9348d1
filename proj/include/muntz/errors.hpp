#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace muntz {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. gamma(x <= 0)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A value left the representable range; raised instead of producing an infinity.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// The working precision cannot deliver a meaningful result.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

/// Two objects live on incompatible Muntz grids, or an exponent is not on the grid.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// A truncated series is too short for the requested operation.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// Caputo derivative requested on an exponent it cannot map into a Muntz series.
class InadmissibleExponentError : public Error {
 public:
  using Error::Error;
};

/// A structurally well-formed input violates a semantic rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Syntax error in an expression, with the byte offset where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(std::size_t byte_offset, std::string expected, std::string found)
      : Error("parse error at offset " + std::to_string(byte_offset) + ": expected " + expected +
              ", found " + found),
        byte_offset_(byte_offset),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  std::size_t byte_offset_;
  std::string expected_;
  std::string found_;
};

}  // namespace muntz
