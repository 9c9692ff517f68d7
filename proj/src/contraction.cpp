#include "mcheck/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "contraction_core.hpp"
#include "mcheck/error.hpp"

namespace mcheck {

namespace detail {

ContractionIndex index_from_classes(const CsrMatrix& B, std::span<const std::uint8_t> contracted,
                                    bool prune) {
  const index_t* row_ptr = B.row_ptr().data();
  const index_t* col_idx = B.col_idx().data();
  auto edges = [row_ptr, col_idx](index_t i, auto&& f) {
    for (index_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) f(col_idx[k]);
  };
  return contracted_bfs(B.nrows(), B.ncols(), contracted, edges, prune, B.nnz());
}

}  // namespace detail

namespace {

void require_substochastic(const CsrMatrix& B) {
  const auto report = validate_substochastic(B);
  if (!report) throw Error(Errc::NotSubstochastic, report.describe());
}

void require_oracle_size(index_t rows, index_t cols) {
  if (rows > kOracleMaxOrder || cols > kOracleMaxOrder) {
    throw Error(Errc::OrderTooLargeForOracle,
                "dense oracles accept dimensions up to " + std::to_string(kOracleMaxOrder));
  }
}

void require_square(const CsrMatrix& B) {
  if (!B.is_square()) throw Error(Errc::NotSquare, "matrix must be square");
}

void require_compatible(std::span<const CsrMatrix> Bs) {
  for (index_t k = 0; k + 1 < Bs.size(); ++k) {
    if (Bs[k].ncols() != Bs[k + 1].nrows()) {
      throw Error(Errc::IncompatibleDimensions,
                  "matrix " + std::to_string(k + 1) + " has " + std::to_string(Bs[k].ncols()) +
                      " columns but matrix " + std::to_string(k + 2) + " has " +
                      std::to_string(Bs[k + 1].nrows()) + " rows");
    }
  }
}

}  // namespace

ContractionIndex index_of_contraction(const CsrMatrix& B, const Tolerance& tol,
                                      ContractionOptions options) {
  // Validation and classification share one pass over the row-sums.
  check_float_model(B.padded_order(), B.max_row_nnz(), tol);
  const double band = default_tolerance(B.max_row_nnz()).value();
  const double threshold = 1.0 - tol.value();
  std::vector<std::uint8_t> deficient(B.nrows(), 0);
  for (index_t i = 0; i < B.nrows(); ++i) {
    const auto vals = B.row_values(i);
    if (std::any_of(vals.begin(), vals.end(), [](double v) { return v < 0.0; })) {
      throw Error(Errc::NotSubstochastic,
                  SubstochasticReport{false, i, SubstochasticViolation::NegativeEntry, 0.0}.describe());
    }
    const double t = row_sum(vals);
    if (t > 1.0 + band) {
      throw Error(Errc::NotSubstochastic,
                  SubstochasticReport{false, i, SubstochasticViolation::RowSumExceedsOne, t}.describe());
    }
    deficient[i] = t < threshold ? 1 : 0;
  }
  return detail::index_from_classes(B, deficient, options.prune_edges);
}

ContractionIndex index_of_contraction(const CsrMatrix& B) {
  return index_of_contraction(B, default_tolerance(B.max_row_nnz()));
}

ContractionIndex index_of_contraction(const DenseMatrix& B, const Tolerance& tol) {
  return detail::dense_index(B, tol, true);
}

ContractionIndex detail::dense_index(const DenseMatrix& B, const Tolerance& tol, bool validate) {
  const index_t m = B.nrows();
  std::vector<std::uint8_t> deficient(m, 0);
  index_t max_nnz = 0;
  const double threshold = 1.0 - tol.value();
  for (index_t i = 0; i < m; ++i) {
    // Both sums in one pass; which one applies depends on the nonzero count.
    double plain = 0.0;
    KahanAccumulator kahan;
    index_t count = 0;
    for (double v : B.row(i)) {
      if (v == 0.0) continue;
      if (validate && v < 0.0) throw Error(Errc::NotSubstochastic, "negative entry in row " + std::to_string(i + 1));
      plain += v;
      kahan += v;
      ++count;
    }
    const double t = count <= kKahanCutoff ? plain : kahan.sum;
    if (validate && t > 1.0 + tol.value()) {
      throw Error(Errc::NotSubstochastic, "row-sum exceeds one in row " + std::to_string(i + 1));
    }
    deficient[i] = t < threshold ? 1 : 0;
    max_nnz = std::max(max_nnz, count);
  }
  check_float_model(std::max(m, B.ncols()), max_nnz, tol);

  auto edges = [&B](index_t i, auto&& f) {
    const auto row = B.row(i);
    for (index_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) f(j);
    }
  };
  return detail::contracted_bfs(m, B.ncols(), deficient, edges, true, m * B.ncols());
}

// ---------------------------------------------------------------------------
// Dense oracles

double inf_norm(const DenseMatrix& M) {
  double norm = 0.0;
  for (index_t i = 0; i < M.nrows(); ++i) {
    double t = 0.0;
    for (double v : M.row(i)) t += std::fabs(v);
    norm = std::max(norm, t);
  }
  return norm;
}

DenseMatrix multiply(const DenseMatrix& X, const DenseMatrix& Y) {
  if (X.ncols() != Y.nrows()) {
    throw Error(Errc::IncompatibleDimensions, "inner dimensions differ");
  }
  DenseMatrix Z(X.nrows(), Y.ncols());
  for (index_t i = 0; i < X.nrows(); ++i) {
    for (index_t k = 0; k < X.ncols(); ++k) {
      const double x = X(i, k);
      if (x == 0.0) continue;
      for (index_t j = 0; j < Y.ncols(); ++j) Z(i, j) += x * Y(k, j);
    }
  }
  return Z;
}

namespace {

// r_k = 1 - B^k 1 via r_k = d + B r_(k-1), d = 1 - B 1. Every term is
// nonnegative, so a row of r_k is zero exactly when that row of B^k sums to 1.
class DeficitIteration {
 public:
  explicit DeficitIteration(const CsrMatrix& B) : B_(B.to_dense()), d_(B.nrows()), r_(B.nrows(), 0.0) {
    for (index_t i = 0; i < B_.nrows(); ++i) {
      double t = 0.0;
      for (double v : B_.row(i)) t += v;
      d_[i] = std::max(0.0, 1.0 - t);
    }
  }

  void step() {
    std::vector<double> next(d_);
    for (index_t i = 0; i < B_.nrows(); ++i) {
      const auto row = B_.row(i);
      for (index_t j = 0; j < row.size(); ++j) next[i] += row[j] * r_[j];
    }
    r_ = std::move(next);
  }

  // ||B^k||_inf < 1 for the current k.
  bool contracting() const {
    return std::all_of(r_.begin(), r_.end(), [](double x) { return x > 0.0; });
  }

 private:
  DenseMatrix B_;
  std::vector<double> d_;
  std::vector<double> r_;
};

}  // namespace

bool is_contraction_power(const CsrMatrix& B, index_t k) {
  require_square(B);
  require_oracle_size(B.nrows(), B.ncols());
  DeficitIteration it(B);
  // Past the order the answer no longer changes.
  const index_t steps = std::min<index_t>(k, B.nrows() + 1);
  for (index_t e = 0; e < steps; ++e) it.step();
  return it.contracting();
}

ContractionIndex index_by_brute_force(const CsrMatrix& B) {
  require_square(B);
  require_oracle_size(B.nrows(), B.ncols());
  const index_t m = B.nrows();
  if (m == 0) return ContractionIndex::finite(0);
  DeficitIteration it(B);
  // The index is either infinite or below m, so B^1 .. B^m suffice.
  for (index_t k = 1; k <= m; ++k) {
    it.step();
    if (it.contracting()) return ContractionIndex::finite(k - 1);
  }
  return ContractionIndex::infinite();
}

std::vector<double> prefix_product_norms(std::span<const CsrMatrix> Bs, index_t upto) {
  if (Bs.empty()) throw Error(Errc::InvalidArgs, "empty matrix sequence");
  if (upto > Bs.size()) throw Error(Errc::InvalidArgs, "upto exceeds the sequence length");
  require_compatible(Bs.first(upto == 0 ? 1 : upto));
  for (index_t k = 0; k < std::max<index_t>(upto, 1); ++k) {
    require_oracle_size(Bs[k].nrows(), Bs[k].ncols());
  }
  std::vector<double> norms;
  norms.reserve(upto + 1);
  DenseMatrix product = DenseMatrix::identity(Bs.front().nrows());
  norms.push_back(inf_norm(product));
  for (index_t k = 0; k < upto; ++k) {
    product = multiply(product, Bs[k].to_dense());
    norms.push_back(inf_norm(product));
  }
  return norms;
}

// ---------------------------------------------------------------------------
// Sequences

ContractionIndex sequence_index(std::span<const CsrMatrix> Bs, const Tolerance& tol) {
  if (Bs.empty()) throw Error(Errc::InvalidArgs, "empty matrix sequence");
  require_compatible(Bs);

  std::vector<RowClass> classes;
  classes.reserve(Bs.size());
  for (const auto& B : Bs) {
    require_substochastic(B);
    classes.push_back(classify_rows(B, tol));
  }

  // remaining[v]: fewest further steps for a walk sitting at vertex v of the
  // current layer to end in that layer's deficient rows. Layers are swept
  // from the last matrix back to the first.
  constexpr index_t kUnreached = std::numeric_limits<index_t>::max();
  std::vector<index_t> next;
  std::vector<index_t> remaining;
  for (index_t layer = Bs.size(); layer-- > 0;) {
    const CsrMatrix& B = Bs[layer];
    const bool last_layer = layer + 1 == Bs.size();
    remaining.assign(B.nrows(), kUnreached);
    for (index_t v = 0; v < B.nrows(); ++v) {
      if (classes[layer].contains(v)) {
        remaining[v] = 0;
        continue;
      }
      if (last_layer) continue;
      index_t best = kUnreached;
      for (index_t j : B.row_cols(v)) best = std::min(best, next[j]);
      if (best != kUnreached) remaining[v] = best + 1;
    }
    next.swap(remaining);
  }

  index_t result = 0;
  for (index_t v = 0; v < Bs.front().nrows(); ++v) {
    if (classes.front().contains(v)) continue;
    if (next[v] == kUnreached) return ContractionIndex::infinite();
    result = std::max(result, next[v]);
  }
  return ContractionIndex::finite(result);
}

// ---------------------------------------------------------------------------
// Normal form

NormalForm scc_normal_form(const CsrMatrix& B) {
  require_square(B);
  const index_t n = B.nrows();
  constexpr index_t kUnvisited = std::numeric_limits<index_t>::max();

  std::vector<index_t> number(n, kUnvisited);
  std::vector<index_t> lowlink(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<index_t> stack;
  std::vector<std::vector<index_t>> components;  // reverse topological order
  index_t counter = 0;

  struct Frame {
    index_t vertex;
    index_t edge;  // position within the row
  };
  std::vector<Frame> call_stack;

  for (index_t root = 0; root < n; ++root) {
    if (number[root] != kUnvisited) continue;
    call_stack.push_back({root, 0});
    number[root] = lowlink[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;

    while (!call_stack.empty()) {
      Frame& frame = call_stack.back();
      const index_t v = frame.vertex;
      const auto cols = B.row_cols(v);
      if (frame.edge < cols.size()) {
        const index_t w = cols[frame.edge++];
        if (number[w] == kUnvisited) {
          number[w] = lowlink[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call_stack.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[v] = std::min(lowlink[v], number[w]);
        }
        continue;
      }
      if (lowlink[v] == number[v]) {
        std::vector<index_t> component;
        index_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          component.push_back(w);
        } while (w != v);
        std::sort(component.begin(), component.end());
        components.push_back(std::move(component));
      }
      call_stack.pop_back();
      if (!call_stack.empty()) {
        const index_t parent = call_stack.back().vertex;
        lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
      }
    }
  }

  NormalForm nf;
  nf.permutation.reserve(n);
  nf.block_starts.push_back(0);
  for (auto it = components.rbegin(); it != components.rend(); ++it) {
    nf.permutation.insert(nf.permutation.end(), it->begin(), it->end());
    nf.block_starts.push_back(nf.permutation.size());
  }
  return nf;
}

CsrMatrix permute_symmetric(const CsrMatrix& B, std::span<const index_t> perm) {
  require_square(B);
  const index_t n = B.nrows();
  if (perm.size() != n) throw Error(Errc::InvalidArgs, "permutation length differs from order");
  std::vector<index_t> position(n, n);
  for (index_t k = 0; k < n; ++k) {
    if (perm[k] >= n || position[perm[k]] != n) {
      throw Error(Errc::InvalidArgs, "not a permutation");
    }
    position[perm[k]] = k;
  }
  std::vector<Triplet> entries;
  entries.reserve(B.nnz());
  for (const auto& t : B.triplets()) entries.push_back({position[t.row], position[t.col], t.value});
  return csr_from_triplets(n, n, entries);
}

CsrMatrix principal_submatrix(const CsrMatrix& B, index_t begin, index_t end) {
  require_square(B);
  if (begin > end || end > B.nrows()) throw Error(Errc::IndexOutOfRange, "bad submatrix range");
  std::vector<Triplet> entries;
  for (index_t i = begin; i < end; ++i) {
    const auto cols = B.row_cols(i);
    const auto vals = B.row_values(i);
    for (index_t k = 0; k < cols.size(); ++k) {
      if (cols[k] >= begin && cols[k] < end) entries.push_back({i - begin, cols[k] - begin, vals[k]});
    }
  }
  return csr_from_triplets(end - begin, end - begin, entries);
}

}  // namespace mcheck
