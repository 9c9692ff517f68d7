#include "mcheck/mmio.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "mcheck/error.hpp"

namespace mcheck {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c) != 0; });
}

index_t parse_count(std::string_view tok, std::size_t line_no, const char* what) {
  index_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, std::string("expected a nonnegative integer ") + what + ", got '" +
                                  std::string(tok) + "'");
  }
  return v;
}

double parse_value(std::string_view tok, std::size_t line_no) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, "expected a numeric value, got '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value");
  return v;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

}  // namespace

MatrixMarketHeader parse_matrix_market_banner(const std::string& line) {
  const auto tokens = split(line);
  if (tokens.empty() || lower(tokens[0]) != "%%matrixmarket") {
    throw ParseError(1, "missing %%MatrixMarket banner");
  }
  if (tokens.size() != 5) throw ParseError(1, "banner needs object, format, field and symmetry");
  if (lower(tokens[1]) != "matrix") {
    throw Error(Errc::UnsupportedHeader, "object '" + std::string(tokens[1]) + "'");
  }
  MatrixMarketHeader h;
  const std::string format = lower(tokens[2]);
  const std::string field = lower(tokens[3]);
  const std::string symmetry = lower(tokens[4]);
  if (format == "coordinate") {
    h.format = MatrixMarketHeader::Format::Coordinate;
  } else if (format == "array") {
    h.format = MatrixMarketHeader::Format::Array;
  } else {
    throw Error(Errc::UnsupportedHeader, "format '" + format + "'");
  }
  if (field == "real" || field == "double") {
    h.field = MatrixMarketHeader::Field::Real;
  } else if (field == "integer") {
    h.field = MatrixMarketHeader::Field::Integer;
  } else {
    throw Error(Errc::UnsupportedHeader, "field '" + field + "'");
  }
  if (symmetry == "general") {
    h.symmetry = MatrixMarketHeader::Symmetry::General;
  } else if (symmetry == "symmetric") {
    h.symmetry = MatrixMarketHeader::Symmetry::Symmetric;
  } else {
    throw Error(Errc::UnsupportedHeader, "symmetry '" + symmetry + "'");
  }
  return h;
}

CsrMatrix read_matrix_market(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError(1, "empty input");
  const MatrixMarketHeader header = parse_matrix_market_banner(line);
  const bool coordinate = header.format == MatrixMarketHeader::Format::Coordinate;
  const bool symmetric = header.symmetry == MatrixMarketHeader::Symmetry::Symmetric;

  // Size line, after comments and blank lines.
  std::vector<std::string_view> tokens;
  for (;;) {
    if (!reader.next(line)) throw ParseError(reader.line_no() + 1, "missing size line");
    if (line.starts_with('%') || is_blank(line)) continue;
    tokens = split(line);
    break;
  }
  const std::size_t size_line = reader.line_no();
  if (tokens.size() != (coordinate ? 3u : 2u)) {
    throw ParseError(size_line, coordinate ? "size line must be 'rows cols entries'"
                                           : "size line must be 'rows cols'");
  }
  const index_t nrows = parse_count(tokens[0], size_line, "row count");
  const index_t ncols = parse_count(tokens[1], size_line, "column count");
  if (symmetric && nrows != ncols) throw ParseError(size_line, "symmetric matrix must be square");

  index_t expected;
  if (coordinate) {
    expected = parse_count(tokens[2], size_line, "entry count");
  } else {
    expected = symmetric ? nrows * (nrows + 1) / 2 : nrows * ncols;
  }

  std::vector<Triplet> entries;
  entries.reserve(symmetric ? 2 * expected : expected);
  // Column-major walk for the array format (lower triangle when symmetric).
  index_t arr_row = 0;
  index_t arr_col = 0;
  index_t read = 0;
  while (read < expected) {
    if (!reader.next(line)) {
      throw ParseError(reader.line_no() + 1, "expected " + std::to_string(expected) +
                                                 " entries, found " + std::to_string(read));
    }
    if (is_blank(line) || line.starts_with('%')) continue;
    tokens = split(line);
    const std::size_t ln = reader.line_no();
    index_t row;
    index_t col;
    double value;
    if (coordinate) {
      if (tokens.size() != 3) throw ParseError(ln, "entry must be 'row col value'");
      row = parse_count(tokens[0], ln, "row index");
      col = parse_count(tokens[1], ln, "column index");
      value = parse_value(tokens[2], ln);
      if (row < 1 || row > nrows || col < 1 || col > ncols) {
        throw Error(Errc::IndexOutOfRange, "line " + std::to_string(ln) + ": entry (" +
                                               std::to_string(row) + ", " + std::to_string(col) +
                                               ") outside " + std::to_string(nrows) + "x" +
                                               std::to_string(ncols));
      }
      --row;
      --col;
    } else {
      if (tokens.size() != 1) throw ParseError(ln, "array entry must be a single value");
      value = parse_value(tokens[0], ln);
      row = arr_row;
      col = arr_col;
      if (++arr_row == nrows) {
        ++arr_col;
        arr_row = symmetric ? arr_col : 0;
      }
    }
    entries.push_back({row, col, value});
    if (symmetric && row != col) entries.push_back({col, row, value});
    ++read;
  }
  while (reader.next(line)) {
    if (!is_blank(line)) throw ParseError(reader.line_no(), "unexpected data after the last entry");
  }
  return csr_from_triplets(nrows, ncols, entries);
}

CsrMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return read_matrix_market(in);
}

void write_matrix_market(const CsrMatrix& M, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << M.nrows() << ' ' << M.ncols() << ' ' << M.nnz() << '\n';
  char buf[64];
  for (index_t i = 0; i < M.nrows(); ++i) {
    const auto cols = M.row_cols(i);
    const auto vals = M.row_values(i);
    for (index_t k = 0; k < cols.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", vals[k]);
      out << (i + 1) << ' ' << (cols[k] + 1) << ' ' << buf << '\n';
    }
  }
  if (!out) throw Error(Errc::IoError, "write failed");
}

void write_matrix_market(const CsrMatrix& M, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  write_matrix_market(M, out);
  out.flush();
  if (!out) throw Error(Errc::IoError, "write to " + path.string() + " failed");
}

}  // namespace mcheck
