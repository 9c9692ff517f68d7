#pragma once

#include <mcheck/contraction.hpp>
#include <mcheck/matcore.hpp>
#include <mcheck/sampler.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fixtures {

using mcheck::CsrMatrix;
using mcheck::index_t;
using mcheck::Triplet;

// Ones on the subdiagonal: row 0 is the only deficient row and the index is n - 1.
inline CsrMatrix subdiagonal_ones(index_t n) {
  std::vector<Triplet> t;
  for (index_t i = 1; i < n; ++i) t.push_back({i, i - 1, 1.0});
  return mcheck::csr_from_triplets(n, n, t);
}

// +1 on the diagonal, -1 on the subdiagonal; its point Jacobi matrix is subdiagonal_ones(n).
inline CsrMatrix bidiagonal_wcdd(index_t n) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < n; ++i) {
    t.push_back({i, i, 1.0});
    if (i > 0) t.push_back({i, i - 1, -1.0});
  }
  return mcheck::csr_from_triplets(n, n, t);
}

// ((1, -1), (-1, 1)): w.d.d. but singular.
inline CsrMatrix singular_pair() {
  const std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, -1.0}, {1, 0, -1.0}, {1, 1, 1.0}};
  return mcheck::csr_from_triplets(2, 2, t);
}

// The eight-vertex example graph; vertices 7 and 8 (indices 6 and 7) are the deficient rows.
inline CsrMatrix eight_vertex_example() {
  const std::vector<Triplet> t{
      {0, 1, 1.0},                                  // 1 -> 2
      {1, 2, 0.25}, {1, 3, 0.25}, {1, 6, 0.5},      // 2 -> 3, 4, 7
      {2, 0, 0.5},  {2, 6, 0.5},                    // 3 -> 1, 7
      {3, 4, 0.5},  {3, 7, 0.5},                    // 4 -> 5, 8
      {4, 3, 0.5},  {4, 5, 0.5},                    // 5 -> 4, 6
      {5, 4, 0.5},  {5, 7, 0.5},                    // 6 -> 5, 8
  };
  return mcheck::csr_from_triplets(8, 8, t);
}

// Shifted ones above the diagonal with a last row of 1/n entries, the first one reduced by nu.
inline CsrMatrix b_nu(index_t n, double nu) {
  std::vector<Triplet> t;
  for (index_t i = 0; i + 1 < n; ++i) t.push_back({i, i + 1, 1.0});
  const double w = 1.0 / static_cast<double>(n);
  for (index_t j = 0; j < n; ++j) t.push_back({n - 1, j, j == 0 ? w - nu : w});
  return mcheck::csr_from_triplets(n, n, t);
}

inline CsrMatrix identity(index_t n) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return mcheck::csr_from_triplets(n, n, t);
}

inline CsrMatrix zero(index_t n) { return mcheck::csr_from_triplets(n, n, std::vector<Triplet>{}); }

// A directed cycle 0 -> 1 -> ... -> n-1 -> 0 with unit weights.
inline CsrMatrix cycle(index_t n) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < n; ++i) t.push_back({i, (i + 1) % n, 1.0});
  return mcheck::csr_from_triplets(n, n, t);
}

// Row-stochastic matrix built from a cycle plus random dyadic chords; scaling row
// `deficient_row` by 1/2 makes it deficient (pass n to keep it stochastic).
inline CsrMatrix irreducible_dyadic(index_t n, mcheck::Rng& rng, index_t deficient_row) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < n; ++i) {
    const double scale = i == deficient_row ? 0.5 : 1.0;
    const index_t extra = rng.uniform_index(n);
    if (extra == (i + 1) % n) {
      t.push_back({i, (i + 1) % n, scale});
    } else {
      t.push_back({i, (i + 1) % n, 0.5 * scale});
      t.push_back({i, extra, 0.5 * scale});
    }
  }
  return mcheck::csr_from_triplets(n, n, t);
}

inline mcheck::SampleConfig dyadic_config(index_t n, index_t nnz, std::uint64_t seed, double deficient_p,
                                          int bits = 20) {
  mcheck::SampleConfig cfg;
  cfg.n = n;
  cfg.nnz = nnz;
  cfg.seed = seed;
  cfg.deficient_row_probability = deficient_p;
  cfg.dyadic_bits = bits;
  return cfg;
}

inline std::vector<index_t> random_permutation(index_t n, mcheck::Rng& rng) {
  return mcheck::sample_without_replacement(n, n, rng);
}

// Row-scales a square matrix: (D A)(i, j) = d[i] * A(i, j).
inline CsrMatrix scale_rows(const CsrMatrix& A, const std::vector<double>& d) {
  std::vector<Triplet> t;
  for (const Triplet& e : A.triplets()) t.push_back({e.row, e.col, d[e.row] * e.value});
  return mcheck::csr_from_triplets(A.nrows(), A.ncols(), t);
}

// Splits `total` over k edges as total * (1/2, 1/4, ..., 2^-(k-1), 2^-(k-1)): dyadic and exact.
inline std::vector<double> dyadic_split(index_t k, double total) {
  std::vector<double> w(k);
  for (index_t t = 0; t < k; ++t) w[t] = std::ldexp(total, -static_cast<int>(std::min(t + 1, k - 1)));
  if (k == 1) w[0] = total;
  return w;
}

struct BlockAssembly {
  CsrMatrix B;
  std::vector<index_t> sizes;
};

// A convergent block upper-triangular substochastic matrix: each diagonal
// block is a cycle with random chords (or a 1x1 zero block), every block but
// the last leaks into later blocks, and the last block has a deficient row.
inline BlockAssembly block_triangular(mcheck::Rng& rng, index_t max_blocks = 4, index_t max_order = 8) {
  const index_t r = 2 + rng.uniform_index(max_blocks - 1);
  std::vector<index_t> sizes(r);
  std::vector<index_t> start(r + 1, 0);
  for (index_t b = 0; b < r; ++b) {
    sizes[b] = 1 + rng.uniform_index(max_order);
    start[b + 1] = start[b] + sizes[b];
  }
  const index_t n = start[r];
  std::vector<Triplet> t;
  for (index_t b = 0; b < r; ++b) {
    const index_t s = sizes[b];
    const bool last = b + 1 == r;
    const index_t special = start[b] + rng.uniform_index(s);
    for (index_t i = start[b]; i < start[b + 1]; ++i) {
      std::vector<index_t> cols;
      const index_t local = i - start[b];
      if (s > 1) {
        cols.push_back(start[b] + (local + 1) % s);
        if (rng.uniform01() < 0.4) cols.push_back(start[b] + rng.uniform_index(s));
      } else if (rng.uniform01() < 0.5) {
        cols.push_back(i);  // 1x1 irreducible block instead of a zero block
      }
      double total = 1.0;
      if (last) {
        if (i == special || rng.uniform01() < 0.2) total = 0.5;
      } else if (i == special || rng.uniform01() < 0.3) {
        cols.push_back(start[b + 1] + rng.uniform_index(n - start[b + 1]));
      }
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
      if (cols.empty()) continue;  // zero row
      const auto w = dyadic_split(cols.size(), total);
      for (index_t k = 0; k < cols.size(); ++k) t.push_back({i, cols[k], w[k]});
    }
  }
  return {mcheck::csr_from_triplets(n, n, t), sizes};
}

// Same pattern and same deficient rows as B, with fresh weights on a grid of
// 1/16: a row sums to 1, or to at most 15/16 if it is deficient in B. Products
// of up to 12 such matrices are exact in double precision. Rows of B may hold
// at most 15 entries.
inline CsrMatrix reweighted(const CsrMatrix& B, const std::vector<bool>& deficient, mcheck::Rng& rng) {
  std::vector<Triplet> t;
  for (index_t i = 0; i < B.nrows(); ++i) {
    const auto cols = B.row_cols(i);
    const index_t k = cols.size();
    if (k == 0) continue;
    const index_t units = deficient[i] ? k + rng.uniform_index(16 - k) : 16;
    // k positive parts of `units`: cut points drawn from 1..units-1.
    auto cuts = mcheck::sample_without_replacement(units - 1, k - 1, rng);
    for (auto& c : cuts) ++c;
    cuts.push_back(0);
    cuts.push_back(units);
    std::sort(cuts.begin(), cuts.end());
    for (index_t e = 0; e < k; ++e) t.push_back({i, cols[e], std::ldexp(static_cast<double>(cuts[e + 1] - cuts[e]), -4)});
  }
  return mcheck::csr_from_triplets(B.nrows(), B.ncols(), t);
}

}  // namespace fixtures
