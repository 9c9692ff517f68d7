#pragma once

#include <span>
#include <vector>

#include "mcheck/matcore.hpp"

namespace mcheck {

/// Dense oracles refuse inputs with a dimension above this.
inline constexpr index_t kOracleMaxOrder = 64;

struct ContractionOptions {
  /// Skip self-loops and edges leaving rows of the contracted set while
  /// building the reversed graph. Does not change the result.
  bool prune_edges = true;
};

/// Index of contraction of a substochastic matrix: the longest shortest walk
/// from a row with unit sum to a row whose sum is below one, or infinity if
/// some row has no such walk.
///
/// The rows with sum < 1 - tol are contracted into a single vertex, edges are
/// reversed and a breadth-first search runs from that vertex. Runs in
/// O(nrows + ncols + nnz). Rectangular inputs are treated as zero padded;
/// only the original rows are start vertices.
///
/// Throws NotSubstochastic, ToleranceTooSmall or OrderTooLargeForFloat.
ContractionIndex index_of_contraction(const CsrMatrix& B, const Tolerance& tol,
                                      ContractionOptions options = {});

/// Same, with default_tolerance(B.max_row_nnz()).
ContractionIndex index_of_contraction(const CsrMatrix& B);

/// Quadratic-time variant reading every entry of a dense matrix.
ContractionIndex index_of_contraction(const DenseMatrix& B, const Tolerance& tol);

/// Oracle: ||B^k||_inf < 1 (B^0 = I). Uses 1 - B^k 1 = sum_{t<k} B^t (1 - B 1),
/// evaluated by repeated dense multiplication. All terms are nonnegative, so
/// the answer is exact whenever the row-sums of B are (e.g. dyadic entries).
bool is_contraction_power(const CsrMatrix& B, index_t k);

/// Oracle: the smallest alpha < order with ||B^(alpha+1)||_inf < 1, or
/// infinity if there is none.
ContractionIndex index_by_brute_force(const CsrMatrix& B);

/// Index of contraction of a finite sequence of compatible substochastic
/// matrices B_1, B_2, ..., B_L.
///
/// A walk i_1 -> ... -> i_{l+1} takes its k-th step along graph B_k and
/// succeeds when i_{l+1} lies in the deficient rows of B_{l+1}. Only walks
/// that succeed within the given list count (l + 1 <= L): a finite prefix can
/// certify a finite index but never refute one, so anything uncertified is
/// reported as infinite.
ContractionIndex sequence_index(std::span<const CsrMatrix> Bs, const Tolerance& tol);

/// [||C_0||, ..., ||C_upto||] where C_0 = I and C_k = B_1 B_2 ... B_k, computed
/// densely left to right.
std::vector<double> prefix_product_norms(std::span<const CsrMatrix> Bs, index_t upto);

/// Symmetric permutation of a square matrix to block upper-triangular form
/// with strongly connected (or 1x1 zero) diagonal blocks.
struct NormalForm {
  /// permutation[k] is the original index placed at position k.
  std::vector<index_t> permutation;
  /// Block b occupies positions [block_starts[b], block_starts[b + 1]).
  std::vector<index_t> block_starts;

  index_t block_count() const { return block_starts.empty() ? 0 : block_starts.size() - 1; }
  index_t block_size(index_t b) const { return block_starts[b + 1] - block_starts[b]; }
};

/// Tarjan's algorithm; blocks come out in topological order of the
/// condensation so that every edge points into the same or a later block.
NormalForm scc_normal_form(const CsrMatrix& B);

/// P B P^T with (P B P^T)(i, j) = B(perm[i], perm[j]).
CsrMatrix permute_symmetric(const CsrMatrix& B, std::span<const index_t> perm);

/// Rows and columns [begin, end) of a square matrix.
CsrMatrix principal_submatrix(const CsrMatrix& B, index_t begin, index_t end);

/// ||M||_inf for a dense matrix.
double inf_norm(const DenseMatrix& M);

/// Dense product, throws IncompatibleDimensions.
DenseMatrix multiply(const DenseMatrix& X, const DenseMatrix& Y);

}  // namespace mcheck
