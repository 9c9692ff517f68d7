#include "mcheck/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mcheck/error.hpp"

namespace mcheck {

namespace {

void require_finite(double v) {
  if (!std::isfinite(v)) {
    throw Error(Errc::NonFiniteValue, "matrix entries must be finite");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// DenseMatrix

DenseMatrix::DenseMatrix(index_t nrows, index_t ncols)
    : nrows_(nrows), ncols_(ncols), data_(nrows * ncols, 0.0) {}

DenseMatrix::DenseMatrix(index_t nrows, index_t ncols, std::vector<double> data)
    : nrows_(nrows), ncols_(ncols), data_(std::move(data)) {
  if (data_.size() != nrows_ * ncols_) {
    throw Error(Errc::InvalidArgs, "dense data length must equal nrows * ncols");
  }
  std::for_each(data_.begin(), data_.end(), require_finite);
}

DenseMatrix DenseMatrix::identity(index_t order) {
  DenseMatrix m(order, order);
  for (index_t i = 0; i < order; ++i) m(i, i) = 1.0;
  return m;
}

// ---------------------------------------------------------------------------
// CsrMatrix

CsrMatrix::CsrMatrix(index_t nrows, index_t ncols, std::vector<index_t> row_ptr,
                     std::vector<index_t> col_idx, std::vector<double> values)
    : nrows_(nrows),
      ncols_(ncols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != nrows_ + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size()) {
    throw Error(Errc::InvalidArgs, "inconsistent CSR array lengths");
  }
  for (index_t i = 0; i < nrows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) {
      throw Error(Errc::InvalidArgs, "row_ptr must be nondecreasing");
    }
    max_row_nnz_ = std::max(max_row_nnz_, row_nnz(i));
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= ncols_) {
        throw Error(Errc::IndexOutOfRange, "column index out of range");
      }
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) {
        throw Error(Errc::InvalidArgs, "column indices must be strictly increasing");
      }
      require_finite(values_[k]);
      if (values_[k] == 0.0) {
        throw Error(Errc::InvalidArgs, "explicitly stored zeros are not allowed");
      }
    }
  }
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& dense) {
  std::vector<index_t> row_ptr{0};
  std::vector<index_t> col_idx;
  std::vector<double> values;
  row_ptr.reserve(dense.nrows() + 1);
  for (index_t i = 0; i < dense.nrows(); ++i) {
    for (index_t j = 0; j < dense.ncols(); ++j) {
      const double v = dense(i, j);
      require_finite(v);
      if (v != 0.0) {
        col_idx.push_back(j);
        values.push_back(v);
      }
    }
    row_ptr.push_back(col_idx.size());
  }
  return CsrMatrix(dense.nrows(), dense.ncols(), std::move(row_ptr),
                   std::move(col_idx), std::move(values));
}

double CsrMatrix::at(index_t i, index_t j) const {
  if (i >= nrows_ || j >= ncols_) {
    throw Error(Errc::IndexOutOfRange, "entry index out of range");
  }
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_ptr_[i] + static_cast<index_t>(it - cols.begin())];
}

std::vector<Triplet> CsrMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (index_t i = 0; i < nrows_; ++i) {
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out.push_back({i, col_idx_[k], values_[k]});
    }
  }
  return out;
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix d(nrows_, ncols_);
  for (index_t i = 0; i < nrows_; ++i) {
    for (index_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      d(i, col_idx_[k]) = values_[k];
    }
  }
  return d;
}

CsrMatrix csr_from_triplets(index_t nrows, index_t ncols,
                            std::span<const Triplet> triplets) {
  // Counting sort by row keeps the input order within each row, so duplicate
  // summation happens in input order.
  std::vector<index_t> counts(nrows + 1, 0);
  for (const auto& t : triplets) {
    if (t.row >= nrows || t.col >= ncols) {
      throw Error(Errc::IndexOutOfRange,
                  "triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                      ") outside " + std::to_string(nrows) + "x" + std::to_string(ncols));
    }
    require_finite(t.value);
    ++counts[t.row + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());

  std::vector<index_t> order(triplets.size());
  {
    std::vector<index_t> next(counts.begin(), counts.end() - 1);
    for (index_t k = 0; k < triplets.size(); ++k) order[next[triplets[k].row]++] = k;
  }

  std::vector<index_t> row_ptr{0};
  row_ptr.reserve(nrows + 1);
  std::vector<index_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());

  for (index_t i = 0; i < nrows; ++i) {
    auto first = order.begin() + static_cast<std::ptrdiff_t>(counts[i]);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(counts[i + 1]);
    std::stable_sort(first, last, [&](index_t a, index_t b) {
      return triplets[a].col < triplets[b].col;
    });
    for (auto it = first; it != last;) {
      const index_t col = triplets[*it].col;
      double sum = 0.0;
      for (; it != last && triplets[*it].col == col; ++it) sum += triplets[*it].value;
      require_finite(sum);
      if (sum != 0.0) {
        col_idx.push_back(col);
        values.push_back(sum);
      }
    }
    row_ptr.push_back(col_idx.size());
  }
  return CsrMatrix(nrows, ncols, std::move(row_ptr), std::move(col_idx),
                   std::move(values));
}

// ---------------------------------------------------------------------------
// Floating-point model

double gamma_k(index_t k) {
  const double ke = static_cast<double>(k) * kUnitRoundoff;
  return ke / (1.0 - ke);
}

double row_sum_error_bound(index_t k) {
  if (k <= kKahanCutoff) return gamma_k(k == 0 ? 0 : k - 1);
  // Kahan: (2u + O(k u^2)) times the sum of the terms.
  return 2.0 * kUnitRoundoff + 2.0 * static_cast<double>(k) * kUnitRoundoff * kUnitRoundoff;
}

Tolerance::Tolerance(double tol) : tol_(tol) {
  if (!(tol > 0.0 && tol < 1.0)) {
    throw Error(Errc::InvalidTolerance, "tolerance must lie in (0, 1)");
  }
}

Tolerance default_tolerance(index_t max_nnz) {
  const double g = gamma_k(max_nnz == 0 ? 0 : max_nnz - 1);
  return Tolerance(std::max(2.0 * g, 0x1p-50));
}

double row_sum(std::span<const double> values) {
  if (values.size() <= kKahanCutoff) {
    double t = 0.0;
    for (double v : values) t += v;
    return t;
  }
  KahanAccumulator acc;
  for (double v : values) acc += v;
  return acc.sum;
}

double abs_row_sum(std::span<const double> values) {
  if (values.size() <= kKahanCutoff) {
    double t = 0.0;
    for (double v : values) t += std::fabs(v);
    return t;
  }
  KahanAccumulator acc;
  for (double v : values) acc += std::fabs(v);
  return acc.sum;
}

std::string SubstochasticReport::describe() const {
  if (ok) return "ok";
  std::ostringstream os;
  os << "row " << (*row + 1) << ": ";
  if (*reason == SubstochasticViolation::NegativeEntry) {
    os << "negative entry";
  } else {
    os.precision(17);
    os << "row-sum " << row_sum << " exceeds one";
  }
  return os.str();
}

SubstochasticReport validate_substochastic(const CsrMatrix& B, std::optional<double> slack) {
  const double band = slack.value_or(default_tolerance(B.max_row_nnz()).value());
  for (index_t i = 0; i < B.nrows(); ++i) {
    const auto vals = B.row_values(i);
    for (double v : vals) {
      if (v < 0.0) {
        return {false, i, SubstochasticViolation::NegativeEntry, 0.0};
      }
    }
    const double t = row_sum(vals);
    if (t > 1.0 + band) {
      return {false, i, SubstochasticViolation::RowSumExceedsOne, t};
    }
  }
  return {};
}

void check_float_model(index_t order, index_t max_row_nnz, const Tolerance& tol) {
  if (static_cast<double>(order) * kUnitRoundoff > 1.0) {
    throw Error(Errc::OrderTooLargeForFloat, "order * eps exceeds one");
  }
  const double bound = row_sum_error_bound(max_row_nnz);
  if (tol.value() <= bound) {
    std::ostringstream os;
    os.precision(6);
    os << "tolerance " << tol.value() << " does not exceed the summation error bound "
       << bound << " for rows with " << max_row_nnz << " entries";
    throw Error(Errc::ToleranceTooSmall, os.str());
  }
}

RowClass classify_rows(const CsrMatrix& B, const Tolerance& tol) {
  check_float_model(B.padded_order(), B.max_row_nnz(), tol);
  const double threshold = 1.0 - tol.value();
  RowClass rc;
  rc.in_jhat.assign(B.nrows(), 0);
  for (index_t i = 0; i < B.nrows(); ++i) {
    if (row_sum(B.row_values(i)) < threshold) {
      rc.in_jhat[i] = 1;
      ++rc.jhat_count;
    }
  }
  return rc;
}

std::span<const index_t> graph_edges(const CsrMatrix& B, index_t row) {
  if (row >= B.padded_order()) {
    throw Error(Errc::IndexOutOfRange, "vertex outside the padded graph");
  }
  if (row >= B.nrows()) return {};
  return B.row_cols(row);
}

std::string ContractionIndex::to_string() const {
  return value_ ? std::to_string(*value_) : std::string("infinite");
}

}  // namespace mcheck
