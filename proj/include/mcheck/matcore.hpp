#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mcheck {

using index_t = std::size_t;

/// Unit roundoff of binary64 (2^-53).
inline constexpr double kUnitRoundoff = 0x1p-53;

/// Rows with more stored entries than this are summed with Kahan's algorithm.
inline constexpr index_t kKahanCutoff = 64;

struct Triplet {
  index_t row;
  index_t col;
  double value;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

/// Row-major dense matrix. Used by the quadratic-time code path and by the
/// brute-force oracles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(index_t nrows, index_t ncols);
  DenseMatrix(index_t nrows, index_t ncols, std::vector<double> data);

  static DenseMatrix identity(index_t order);

  index_t nrows() const noexcept { return nrows_; }
  index_t ncols() const noexcept { return ncols_; }
  bool is_square() const noexcept { return nrows_ == ncols_; }

  double operator()(index_t i, index_t j) const { return data_[i * ncols_ + j]; }
  double& operator()(index_t i, index_t j) { return data_[i * ncols_ + j]; }

  std::span<const double> row(index_t i) const {
    return {data_.data() + i * ncols_, ncols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  index_t nrows_ = 0;
  index_t ncols_ = 0;
  std::vector<double> data_;
};

/// Sparse matrix in canonical compressed sparse row form.
///
/// Column indices are strictly increasing within a row, every stored value is
/// finite and nonzero. The sparsity pattern doubles as the digraph of the
/// matrix: edge i -> j exists iff entry (i, j) is stored.
class CsrMatrix {
 public:
  /// The 0x0 matrix.
  CsrMatrix() = default;

  /// Takes ownership of already-canonical arrays; throws if any invariant is
  /// violated (including explicitly stored zeros).
  CsrMatrix(index_t nrows, index_t ncols, std::vector<index_t> row_ptr,
            std::vector<index_t> col_idx, std::vector<double> values);

  static CsrMatrix from_dense(const DenseMatrix& dense);

  index_t nrows() const noexcept { return nrows_; }
  index_t ncols() const noexcept { return ncols_; }
  index_t nnz() const noexcept { return values_.size(); }
  bool is_square() const noexcept { return nrows_ == ncols_; }
  /// Order of the smallest square matrix containing this one (zero padding).
  index_t padded_order() const noexcept { return nrows_ > ncols_ ? nrows_ : ncols_; }

  index_t row_nnz(index_t i) const { return row_ptr_[i + 1] - row_ptr_[i]; }
  index_t max_row_nnz() const noexcept { return max_row_nnz_; }

  std::span<const index_t> row_cols(index_t i) const {
    return {col_idx_.data() + row_ptr_[i], row_nnz(i)};
  }
  std::span<const double> row_values(index_t i) const {
    return {values_.data() + row_ptr_[i], row_nnz(i)};
  }

  std::span<const index_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const index_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Stored value at (i, j), 0 if not stored.
  double at(index_t i, index_t j) const;

  std::vector<Triplet> triplets() const;
  DenseMatrix to_dense() const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  index_t nrows_ = 0;
  index_t ncols_ = 0;
  std::vector<index_t> row_ptr_{0};
  std::vector<index_t> col_idx_;
  std::vector<double> values_;
  index_t max_row_nnz_ = 0;
};

/// Builds a canonical CSR matrix from coordinate entries. Duplicate (row, col)
/// pairs are summed in input order; entries that end up exactly zero are
/// dropped.
CsrMatrix csr_from_triplets(index_t nrows, index_t ncols,
                            std::span<const Triplet> triplets);

/// k*eps / (1 - k*eps): the bound on the relative error of a k-term
/// floating-point sum.
double gamma_k(index_t k);

/// Worst-case relative error of the row-sum routine for a row with k stored
/// entries (plain accumulation up to kKahanCutoff, Kahan above).
double row_sum_error_bound(index_t k);

/// Threshold used to decide whether a row-sum is provably below one.
class Tolerance {
 public:
  /// Throws Errc::InvalidTolerance unless 0 < tol < 1.
  explicit Tolerance(double tol);

  double value() const noexcept { return tol_; }

 private:
  double tol_;
};

/// 2 * gamma_k(max_nnz - 1), floored at 2^-50.
Tolerance default_tolerance(index_t max_nnz);

/// Compensated summation; drop-in for `sum += x` loops.
struct KahanAccumulator {
  double sum = 0.0;
  double compensation = 0.0;

  void operator+=(double value) noexcept {
    const double y = value - compensation;
    const double t = sum + y;
    compensation = (t - sum) - y;
    sum = t;
  }
};

/// Row-sum as used throughout the library: plain left-to-right accumulation
/// for up to kKahanCutoff terms, Kahan summation above.
double row_sum(std::span<const double> values);

/// Like row_sum, but over |values|.
double abs_row_sum(std::span<const double> values);

enum class SubstochasticViolation { NegativeEntry, RowSumExceedsOne };

struct SubstochasticReport {
  bool ok = true;
  std::optional<index_t> row;
  std::optional<SubstochasticViolation> reason;
  double row_sum = 0.0;

  explicit operator bool() const noexcept { return ok; }
  std::string describe() const;
};

/// Checks nonnegativity and row-sums <= 1 + slack. When slack is omitted it
/// defaults to default_tolerance(B.max_row_nnz()).
SubstochasticReport validate_substochastic(const CsrMatrix& B,
                                           std::optional<double> slack = {});

/// Membership of each row in the set of rows whose sum is provably below one.
struct RowClass {
  std::vector<std::uint8_t> in_jhat;
  index_t jhat_count = 0;

  bool contains(index_t i) const { return in_jhat[i] != 0; }
};

/// Marks row i iff its computed row-sum is < 1 - tol.
///
/// Throws ToleranceTooSmall if tol does not exceed the summation error bound
/// of the longest row, and OrderTooLargeForFloat if order * eps > 1.
RowClass classify_rows(const CsrMatrix& B, const Tolerance& tol);

/// Throws unless order * eps <= 1 and tol exceeds the summation error bound
/// for rows with max_row_nnz entries.
void check_float_model(index_t order, index_t max_row_nnz, const Tolerance& tol);

/// Stored columns of `row` (the out-neighbours in the digraph); empty for
/// rows of the zero padding.
std::span<const index_t> graph_edges(const CsrMatrix& B, index_t row);

/// Either a finite nonnegative integer or infinity.
class ContractionIndex {
 public:
  static ContractionIndex finite(index_t k) { return ContractionIndex(k); }
  static ContractionIndex infinite() { return ContractionIndex(); }

  bool is_finite() const noexcept { return value_.has_value(); }
  bool is_infinite() const noexcept { return !value_.has_value(); }
  /// Throws std::bad_optional_access if infinite.
  index_t value() const { return value_.value(); }

  std::string to_string() const;

  friend bool operator==(const ContractionIndex&, const ContractionIndex&) = default;

 private:
  ContractionIndex() = default;
  explicit ContractionIndex(index_t k) : value_(k) {}

  std::optional<index_t> value_;
};

}  // namespace mcheck
