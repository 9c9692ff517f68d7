#include "mcheck/mtest.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "contraction_core.hpp"
#include "mcheck/contraction.hpp"
#include "mcheck/error.hpp"

namespace mcheck {

namespace {

/// Diagonal magnitude and off-diagonal absolute sum of one row, summed the
/// same way as row_sum (plain up to kKahanCutoff terms, Kahan above).
struct RowDominance {
  double diag = 0.0;
  double off = 0.0;
  bool diag_negative = false;
  bool off_positive = false;

  bool weak(double tol) const { return diag - off >= -tol * (diag + off); }
  bool strict(double tol) const { return diag - off > tol * (diag + off); }
};

class DominanceAccumulator {
 public:
  DominanceAccumulator(index_t row, bool compensate) : row_(row), compensate_(compensate) {}

  void add(index_t col, double v) {
    if (col == row_) {
      out_.diag = std::fabs(v);
      out_.diag_negative = v < 0.0;
      return;
    }
    if (v > 0.0) out_.off_positive = true;
    plain_ += std::fabs(v);
    if (compensate_) kahan_ += std::fabs(v);
    ++count_;
  }

  RowDominance finish() {
    out_.off = count_ <= kKahanCutoff ? plain_ : kahan_.sum;
    return out_;
  }

 private:
  index_t row_;
  bool compensate_;
  RowDominance out_;
  double plain_ = 0.0;
  KahanAccumulator kahan_;
  index_t count_ = 0;
};

RowDominance dominance_of(const CsrMatrix& A, index_t i) {
  DominanceAccumulator acc(i, A.row_nnz(i) > kKahanCutoff);
  const auto cols = A.row_cols(i);
  const auto vals = A.row_values(i);
  for (index_t k = 0; k < cols.size(); ++k) acc.add(cols[k], vals[k]);
  return acc.finish();
}

RowDominance dominance_of(const DenseMatrix& A, index_t i) {
  DominanceAccumulator acc(i, true);
  const auto row = A.row(i);
  for (index_t j = 0; j < row.size(); ++j) {
    if (row[j] != 0.0) acc.add(j, row[j]);
  }
  return acc.finish();
}

template <class Matrix>
Predicates predicates_impl(const Matrix& A, double tol) {
  Predicates p;
  p.is_square = A.nrows() == A.ncols();
  p.is_z = p.is_l0 = p.is_l = p.is_wdd = p.is_sdd = true;
  const index_t diag_len = std::min(A.nrows(), A.ncols());
  for (index_t i = 0; i < A.nrows(); ++i) {
    const RowDominance r = dominance_of(A, i);
    if (r.off_positive) p.is_z = false;
    if (i < diag_len) {
      if (r.diag_negative) p.is_l0 = false;
      if (r.diag_negative || r.diag == 0.0) p.is_l = false;
    }
    if (!r.weak(tol)) p.is_wdd = false;
    if (!r.strict(tol)) p.is_sdd = false;
  }
  p.is_l0 = p.is_l0 && p.is_z;
  p.is_l = p.is_l && p.is_z;
  return p;
}

Tolerance resolve(const CsrMatrix& A, const std::optional<Tolerance>& tol) {
  return tol ? *tol : dominance_tolerance(A);
}

Tolerance resolve(const DenseMatrix& A, const std::optional<Tolerance>& tol) {
  if (tol) return *tol;
  index_t max_nnz = 0;
  for (index_t i = 0; i < A.nrows(); ++i) {
    const auto row = A.row(i);
    max_nnz = std::max<index_t>(max_nnz, static_cast<index_t>(std::count_if(
                                             row.begin(), row.end(), [](double v) { return v != 0.0; })));
  }
  return default_tolerance(max_nnz);
}

void require_square(const CsrMatrix& A) {
  if (!A.is_square()) throw Error(Errc::NotSquare, "matrix must be square");
}

MatrixVerdict verdict_from(const Predicates& p) {
  MatrixVerdict v;
  v.is_square = p.is_square;
  v.is_z = p.is_z;
  v.is_l0 = p.is_l0;
  v.is_l = p.is_l;
  v.is_wdd = p.is_wdd;
  v.is_sdd = p.is_sdd;
  return v;
}

MatrixVerdict vacuous_verdict() {
  MatrixVerdict v;
  v.is_square = v.is_z = v.is_l0 = v.is_l = v.is_wdd = v.is_sdd = v.is_wcdd = true;
  v.index = ContractionIndex::finite(0);
  v.is_nonsingular_m_matrix = true;
  return v;
}

}  // namespace

Tolerance dominance_tolerance(const CsrMatrix& A) { return default_tolerance(A.max_row_nnz()); }

Predicates predicates(const CsrMatrix& A, std::optional<Tolerance> tol) {
  return predicates_impl(A, resolve(A, tol).value());
}

Predicates predicates(const DenseMatrix& A, std::optional<Tolerance> tol) {
  return predicates_impl(A, resolve(A, tol).value());
}

WddRowClass classify_dominance(const CsrMatrix& A, const Tolerance& tol) {
  check_float_model(A.padded_order(), A.max_row_nnz(), tol);
  WddRowClass rc;
  rc.in_j.assign(A.nrows(), 0);
  for (index_t i = 0; i < A.nrows(); ++i) {
    if (dominance_of(A, i).strict(tol.value())) {
      rc.in_j[i] = 1;
      ++rc.j_count;
    }
  }
  return rc;
}

namespace {

double diagonal_entry(const CsrMatrix& A, index_t i) {
  const auto cols = A.row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), i);
  return it != cols.end() && *it == i ? A.row_values(i)[it - cols.begin()] : 0.0;
}

// Index of contraction of the point Jacobi matrix of a square L0 w.d.d. A,
// with its rows summed on the fly exactly as classify_rows would sum the
// materialised matrix.
ContractionIndex jacobi_index(const CsrMatrix& A, const Tolerance& tol) {
  const index_t n = A.nrows();
  const double threshold = 1.0 - tol.value();
  std::vector<double> diag(n);
  std::vector<std::uint8_t> deficient(n, 0);
  index_t max_nnz = 0;
  for (index_t i = 0; i < n; ++i) {
    diag[i] = diagonal_entry(A, i);
    const auto cols = A.row_cols(i);
    const auto vals = A.row_values(i);
    double plain = 0.0;
    KahanAccumulator kahan;
    index_t count = 0;
    if (diag[i] == 0.0) {
      plain = 1.0;
      count = 1;
    } else {
      for (index_t k = 0; k < cols.size(); ++k) {
        if (cols[k] == i) continue;
        const double b = -vals[k] / diag[i];
        if (b == 0.0) continue;
        plain += b;
        kahan += b;
        ++count;
      }
    }
    const double t = count <= kKahanCutoff ? plain : kahan.sum;
    deficient[i] = t < threshold ? 1 : 0;
    max_nnz = std::max(max_nnz, count);
  }
  check_float_model(n, max_nnz, tol);
  auto edges = [&](index_t i, auto&& f) {
    const double d = diag[i];
    if (d == 0.0) return;
    const auto cols = A.row_cols(i);
    const auto vals = A.row_values(i);
    for (index_t k = 0; k < cols.size(); ++k) {
      if (cols[k] != i && -vals[k] / d != 0.0) f(cols[k]);
    }
  };
  return detail::contracted_bfs(n, n, deficient, edges, true, A.nnz());
}

CsrMatrix point_jacobi_unchecked(const CsrMatrix& A) {
  const index_t n = A.nrows();
  std::vector<index_t> row_ptr{0};
  row_ptr.reserve(n + 1);
  std::vector<index_t> col_idx;
  std::vector<double> values;
  col_idx.reserve(A.nnz());
  values.reserve(A.nnz());
  for (index_t i = 0; i < n; ++i) {
    const double diag = diagonal_entry(A, i);
    if (diag != 0.0) {
      const auto cols = A.row_cols(i);
      const auto vals = A.row_values(i);
      for (index_t k = 0; k < cols.size(); ++k) {
        if (cols[k] == i) continue;
        const double b = -vals[k] / diag;
        if (b == 0.0) continue;  // underflow
        col_idx.push_back(cols[k]);
        values.push_back(b);
      }
    } else {
      // A w.d.d. L0 row with a zero diagonal is a zero row; I - D*A keeps it
      // as the unit row e_i for every positive d_ii.
      col_idx.push_back(i);
      values.push_back(1.0);
    }
    row_ptr.push_back(col_idx.size());
  }
  return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

}  // namespace

CsrMatrix point_jacobi(const CsrMatrix& A, std::optional<Tolerance> tol) {
  require_square(A);
  const Predicates p = predicates(A, tol);
  if (!p.is_l0) throw Error(Errc::NotL0, "point Jacobi matrix needs an L0-matrix");
  if (!p.is_wdd) throw Error(Errc::NotWdd, "point Jacobi matrix needs a w.d.d. matrix");
  return point_jacobi_unchecked(A);
}

ContractionIndex con_index_by_graph(const CsrMatrix& A, std::optional<Tolerance> tol) {
  require_square(A);
  const Tolerance t = resolve(A, tol);
  if (!predicates(A, t).is_wdd) throw Error(Errc::NotWdd, "index of connectivity needs a w.d.d. matrix");
  const WddRowClass rc = classify_dominance(A, t);
  return detail::index_from_classes(A, rc.in_j, true);
}

ContractionIndex con_index(const CsrMatrix& A, std::optional<Tolerance> tol) {
  require_square(A);
  const Tolerance t = resolve(A, tol);
  const Predicates p = predicates(A, t);
  if (!p.is_wdd) throw Error(Errc::NotWdd, "index of connectivity needs a w.d.d. matrix");
  if (!p.is_l0) return con_index_by_graph(A, t);
  // B_A can exceed unit row-sums inside the dominance band, so it is
  // classified directly rather than validated.
  return jacobi_index(A, t);
}

bool is_wcdd(const CsrMatrix& A, std::optional<Tolerance> tol) {
  if (!A.is_square()) return false;
  if (A.nrows() == 0) return true;
  const Tolerance t = resolve(A, tol);
  if (!predicates(A, t).is_wdd) return false;
  const ContractionIndex idx = con_index(A, t);
  // A finite index on a nonempty matrix already forces J(A) to be nonempty.
  return idx.is_finite() && classify_dominance(A, t).j_count > 0;
}

MatrixVerdict is_nonsingular_m_matrix(const CsrMatrix& A, std::optional<Tolerance> tol) {
  if (A.nrows() == 0 && A.ncols() == 0) return vacuous_verdict();
  const Tolerance t = resolve(A, tol);
  MatrixVerdict v = verdict_from(predicates(A, t));
  if (!(v.is_square && v.is_wdd)) return v;
  if (v.is_l0) {
    v.index = jacobi_index(A, t);
    v.is_wcdd = v.index->is_finite();
  } else {
    v.is_wcdd = con_index_by_graph(A, t).is_finite();
  }
  v.is_nonsingular_m_matrix = v.is_l0 && v.index && v.index->is_finite();
  return v;
}

MatrixVerdict is_nonsingular_m_matrix(const DenseMatrix& A, std::optional<Tolerance> tol) {
  if (A.nrows() == 0 && A.ncols() == 0) return vacuous_verdict();
  const Tolerance t = resolve(A, tol);
  MatrixVerdict v = verdict_from(predicates(A, t));
  if (!(v.is_square && v.is_wdd)) return v;

  const index_t n = A.nrows();
  auto jacobi_entry = [&A](index_t i, index_t j, double diag) { return -A(i, j) / diag; };

  std::vector<std::uint8_t> contracted(n, 0);
  if (v.is_l0) {
    // Point Jacobi rows evaluated on the fly, in the same order and with the
    // same summation rule as the sparse path.
    const double threshold = 1.0 - t.value();
    index_t max_nnz = 0;
    for (index_t i = 0; i < n; ++i) {
      const double diag = A(i, i);
      double plain = 0.0;
      KahanAccumulator kahan;
      index_t count = 0;
      if (diag == 0.0) {
        plain = 1.0;
        kahan += 1.0;
        count = 1;
      } else {
        for (index_t j = 0; j < n; ++j) {
          if (j == i || A(i, j) == 0.0) continue;
          const double b = jacobi_entry(i, j, diag);
          if (b == 0.0) continue;
          plain += b;
          kahan += b;
          ++count;
        }
      }
      const double s = count <= kKahanCutoff ? plain : kahan.sum;
      contracted[i] = s < threshold ? 1 : 0;
      max_nnz = std::max(max_nnz, count);
    }
    check_float_model(n, max_nnz, t);
    auto edges = [&](index_t i, auto&& f) {
      const double diag = A(i, i);
      if (diag == 0.0) return;
      const auto row = A.row(i);
      for (index_t j = 0; j < n; ++j) {
        if (j == i || row[j] == 0.0) continue;
        if (jacobi_entry(i, j, diag) != 0.0) f(j);
      }
    };
    v.index = detail::contracted_bfs(n, n, contracted, edges, true, n * n);
    v.is_wcdd = v.index->is_finite();
  } else {
    for (index_t i = 0; i < n; ++i) contracted[i] = dominance_of(A, i).strict(t.value()) ? 1 : 0;
    auto edges = [&A, n](index_t i, auto&& f) {
      const auto row = A.row(i);
      for (index_t j = 0; j < n; ++j) {
        if (row[j] != 0.0) f(j);
      }
    };
    v.is_wcdd = detail::contracted_bfs(n, n, contracted, edges, true, n * n).is_finite();
  }
  v.is_nonsingular_m_matrix = v.is_l0 && v.index && v.index->is_finite();
  return v;
}

bool monotone_oracle(const DenseMatrix& A, index_t max_order) {
  if (A.nrows() > max_order || A.ncols() > max_order) {
    throw Error(Errc::OrderTooLargeForOracle,
                "monotone oracle accepts orders up to " + std::to_string(max_order));
  }
  if (!A.is_square()) return false;
  const index_t n = A.nrows();
  if (n == 0) return true;
  for (index_t i = 0; i < n; ++i) {
    for (index_t j = 0; j < n; ++j) {
      if (i != j && A(i, j) > 0.0) return false;
    }
  }

  const double eps = kUnitRoundoff;
  const double norm_a = inf_norm(A);
  const double pivot_floor = static_cast<double>(n) * eps * norm_a;

  // LU with partial pivoting, in place.
  DenseMatrix lu = A;
  std::vector<index_t> perm(n);
  for (index_t i = 0; i < n; ++i) perm[i] = i;
  for (index_t k = 0; k < n; ++k) {
    index_t p = k;
    for (index_t i = k + 1; i < n; ++i) {
      if (std::fabs(lu(i, k)) > std::fabs(lu(p, k))) p = i;
    }
    if (!(std::fabs(lu(p, k)) > pivot_floor)) return false;
    if (p != k) {
      for (index_t j = 0; j < n; ++j) std::swap(lu(p, j), lu(k, j));
      std::swap(perm[p], perm[k]);
    }
    const double pivot = lu(k, k);
    for (index_t i = k + 1; i < n; ++i) {
      const double l = lu(i, k) / pivot;
      lu(i, k) = l;
      if (l == 0.0) continue;
      for (index_t j = k + 1; j < n; ++j) lu(i, j) -= l * lu(k, j);
    }
  }

  // Column c of the inverse solves L U x = P e_c.
  DenseMatrix inv(n, n);
  std::vector<double> x(n);
  for (index_t c = 0; c < n; ++c) {
    for (index_t i = 0; i < n; ++i) {
      double s = perm[i] == c ? 1.0 : 0.0;
      for (index_t j = 0; j < i; ++j) s -= lu(i, j) * x[j];
      x[i] = s;
    }
    for (index_t i = n; i-- > 0;) {
      double s = x[i];
      for (index_t j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
      x[i] = s / lu(i, i);
    }
    for (index_t i = 0; i < n; ++i) inv(i, c) = x[i];
  }

  double max_abs = 0.0;
  for (double v : inv.data()) max_abs = std::max(max_abs, std::fabs(v));
  const double cond = norm_a * inf_norm(inv);
  const double slack = static_cast<double>(n) * static_cast<double>(n) * eps * cond * max_abs;
  return std::all_of(inv.data().begin(), inv.data().end(),
                     [slack](double v) { return v >= -slack; });
}

}  // namespace mcheck
