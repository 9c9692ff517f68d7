#include "mcheck/error.hpp"

namespace mcheck {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::ToleranceTooSmall: return "ToleranceTooSmall";
    case Errc::InvalidTolerance: return "InvalidTolerance";
    case Errc::NotSubstochastic: return "NotSubstochastic";
    case Errc::NotSquare: return "NotSquare";
    case Errc::OrderTooLargeForFloat: return "OrderTooLargeForFloat";
    case Errc::OrderTooLargeForOracle: return "OrderTooLargeForOracle";
    case Errc::IncompatibleDimensions: return "IncompatibleDimensions";
    case Errc::NotL0: return "NotL0";
    case Errc::NotWdd: return "NotWdd";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::InvalidArgs: return "InvalidArgs";
    case Errc::ParseError: return "ParseError";
    case Errc::UnsupportedHeader: return "UnsupportedHeader";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : Error(Errc::ParseError, "line " + std::to_string(line) + ": " + reason),
      line_(line) {}

}  // namespace mcheck
