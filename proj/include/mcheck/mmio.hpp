#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mcheck/matcore.hpp"

namespace mcheck {

/// Parsed `%%MatrixMarket matrix <format> <field> <symmetry>` banner. Only
/// real/integer fields and general/symmetric storage are supported.
struct MatrixMarketHeader {
  enum class Format { Coordinate, Array };
  enum class Field { Real, Integer };
  enum class Symmetry { General, Symmetric };

  Format format = Format::Coordinate;
  Field field = Field::Real;
  Symmetry symmetry = Symmetry::General;
};

/// Throws UnsupportedHeader for anything outside the supported subset and
/// ParseError for a malformed banner.
MatrixMarketHeader parse_matrix_market_banner(const std::string& line);

/// Reads a Matrix Market stream. Indices on disk are 1-based; duplicates are
/// summed, zeros dropped and symmetric storage mirrored. LF and CRLF line
/// endings are accepted.
CsrMatrix read_matrix_market(std::istream& in);
CsrMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes coordinate/real/general with 17 significant digits, which reads
/// back to the identical matrix.
void write_matrix_market(const CsrMatrix& M, std::ostream& out);
void write_matrix_market(const CsrMatrix& M, const std::filesystem::path& path);

}  // namespace mcheck
