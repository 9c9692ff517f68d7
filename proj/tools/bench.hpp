#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcheck/matcore.hpp"

namespace mcheck::cli {

inline constexpr double kWilsonZ99 = 2.5758293035489;

struct BenchOptions {
  std::vector<index_t> sizes{128, 256, 512, 1024};
  std::vector<index_t> nnz{6, 12, 24, 48};
  index_t trials = 30;
  index_t warmup = 3;
  std::uint64_t seed = 0;
  /// Largest order handed to the cubic oracle.
  index_t oracle_max = 1024;
  /// Largest order run through the dense quadratic path.
  index_t dense_max = 4096;
  std::optional<Tolerance> tol;

  /// Throws Error(InvalidArgs).
  void validate() const;
};

struct BenchRecord {
  index_t n = 0;
  index_t nnz = 0;
  index_t trial = 0;
  std::string method;
  double wall_time_s = 0.0;
  bool verdict = false;
  /// Absent for the oracle, which does not compute one.
  std::optional<ContractionIndex> index;

  bool operator==(const BenchRecord&) const = default;
};

std::string csv_header();
std::string to_csv_row(const BenchRecord& r);
/// Inverse of to_csv_row. Throws Error(ParseError) on malformed rows.
BenchRecord parse_csv_row(const std::string& line);

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval for a binomial proportion.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = kWilsonZ99);

struct BenchOutcome {
  std::size_t rows = 0;
  std::size_t disagreements = 0;
};

/// Samples `trials` matrices per (n, nnz), times each method after
/// `warmup` discarded runs, writes CSV rows to `csv` and a per-(n, nnz)
/// summary to `summary`.
BenchOutcome run_bench(const BenchOptions& opts, std::ostream& csv, std::ostream& summary);

}  // namespace mcheck::cli
