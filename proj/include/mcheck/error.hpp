#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mcheck {

enum class Errc {
  IndexOutOfRange,
  NonFiniteValue,
  ToleranceTooSmall,
  InvalidTolerance,
  NotSubstochastic,
  NotSquare,
  OrderTooLargeForFloat,
  OrderTooLargeForOracle,
  IncompatibleDimensions,
  NotL0,
  NotWdd,
  InvalidConfig,
  InvalidArgs,
  ParseError,
  UnsupportedHeader,
  IoError,
};

std::string_view to_string(Errc code);

/// Exception type thrown by every fallible library operation.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Parse failure in a Matrix Market stream; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mcheck
