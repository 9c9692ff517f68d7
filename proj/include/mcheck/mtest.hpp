#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mcheck/matcore.hpp"

namespace mcheck {

/// Structural and dominance flags of a matrix.
///
/// Dominance uses a relative band: row i is weakly dominant iff
///   |a_ii| - sum_{j != i} |a_ij| >= -tol * (|a_ii| + sum_{j != i} |a_ij|)
/// and strictly dominant iff the left-hand side exceeds +tol * (...).
struct Predicates {
  bool is_square = false;
  bool is_z = false;
  bool is_l0 = false;
  bool is_l = false;
  bool is_wdd = false;
  bool is_sdd = false;
};

struct MatrixVerdict {
  bool is_square = false;
  bool is_z = false;
  bool is_l0 = false;
  bool is_l = false;
  bool is_wdd = false;
  bool is_sdd = false;
  bool is_wcdd = false;
  /// Index of contraction of the point Jacobi matrix; present iff the
  /// matrix is a square w.d.d. L0-matrix.
  std::optional<ContractionIndex> index;
  bool is_nonsingular_m_matrix = false;
};

/// Rows whose diagonal strictly dominates (the set J(A)).
struct WddRowClass {
  std::vector<std::uint8_t> in_j;
  index_t j_count = 0;

  bool contains(index_t i) const { return in_j[i] != 0; }
};

/// default_tolerance(A.max_row_nnz()).
Tolerance dominance_tolerance(const CsrMatrix& A);

Predicates predicates(const CsrMatrix& A, std::optional<Tolerance> tol = {});
Predicates predicates(const DenseMatrix& A, std::optional<Tolerance> tol = {});

WddRowClass classify_dominance(const CsrMatrix& A, const Tolerance& tol);

/// I - diag(A)^-1 A. A row with a zero diagonal is necessarily zero in a
/// w.d.d. L0-matrix and maps to the unit row e_i, as it does under I - D*A
/// for any positive d_ii.
/// Throws NotSquare, NotL0 or NotWdd.
CsrMatrix point_jacobi(const CsrMatrix& A, std::optional<Tolerance> tol = {});

/// Index of connectivity of a square w.d.d. matrix. L0 inputs go through the
/// point Jacobi matrix; other inputs run the contracted BFS directly on the
/// graph of A with the strictly dominant rows contracted.
/// Throws NotSquare or NotWdd.
ContractionIndex con_index(const CsrMatrix& A, std::optional<Tolerance> tol = {});

/// The direct route of con_index, for any square w.d.d. matrix.
ContractionIndex con_index_by_graph(const CsrMatrix& A, std::optional<Tolerance> tol = {});

/// Weakly chained diagonal dominance; false for non-w.d.d. or non-square input.
bool is_wcdd(const CsrMatrix& A, std::optional<Tolerance> tol = {});

/// Decides whether A is a nonsingular M-matrix, assuming the w.d.d. setting:
/// true iff A is square, L0, w.d.d. and its point Jacobi matrix has a finite
/// index of contraction. Linear in the number of stored entries. The 0x0
/// matrix is vacuously a nonsingular M-matrix.
MatrixVerdict is_nonsingular_m_matrix(const CsrMatrix& A, std::optional<Tolerance> tol = {});

/// Quadratic-time variant on dense storage.
MatrixVerdict is_nonsingular_m_matrix(const DenseMatrix& A, std::optional<Tolerance> tol = {});

/// Oracle: A is a monotone Z-matrix, i.e. nonsingular with a nonnegative
/// inverse. Gaussian elimination with partial pivoting; a pivot of magnitude
/// <= order * eps * ||A||_inf counts as singular, and inverse entries down to
/// -order^2 * eps * cond_inf(A) * max|A^-1| count as nonnegative.
/// Throws OrderTooLargeForOracle above max_order.
bool monotone_oracle(const DenseMatrix& A, index_t max_order = 64);

}  // namespace mcheck
