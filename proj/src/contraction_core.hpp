#pragma once

// Shared by the sparse and dense paths and by the w.d.d. tests.

#include <cstdint>
#include <span>
#include <vector>

#include "mcheck/matcore.hpp"

namespace mcheck::detail {

template <class Index, class ForEachEdge>
ContractionIndex contracted_bfs_impl(index_t nrows, index_t ncols,
                                     std::span<const std::uint8_t> contracted,
                                     ForEachEdge& for_each_edge, bool prune) {
  const index_t padded = nrows > ncols ? nrows : ncols;
  const index_t nv = padded + 1;
  auto vertex = [&](index_t v) -> Index {
    return (v < nrows && contracted[v]) ? Index{0} : static_cast<Index>(v + 1);
  };

  // Reversed adjacency in CSR form: edge i -> j becomes j' -> i' in bucket
  // j'. Bucket ends are counted first, then filled back to front so that
  // start[v] finishes at the bucket's first slot.
  std::vector<Index> start(nv + 1, 0);
  for (index_t i = 0; i < nrows; ++i) {
    if (prune && contracted[i]) continue;
    for_each_edge(i, [&](index_t j) {
      if (prune && j == i) return;
      ++start[vertex(j)];
    });
  }
  for (index_t v = 0; v < nv; ++v) start[v + 1] += start[v];

  std::vector<Index> neighbours(start[nv]);
  for (index_t i = 0; i < nrows; ++i) {
    if (prune && contracted[i]) continue;
    const Index from = vertex(i);
    for_each_edge(i, [&](index_t j) {
      if (prune && j == i) return;
      neighbours[--start[vertex(j)]] = from;
    });
  }

  std::vector<std::uint8_t> seen(nv, 0);
  index_t reached_rows = 0;
  for (index_t i = 0; i < nrows; ++i) {
    if (contracted[i]) {
      seen[i + 1] = 1;
      ++reached_rows;
    }
  }

  // Level-synchronous FIFO: queue[head, level_end) holds distance `depth`.
  std::vector<Index> queue;
  queue.reserve(nv);
  queue.push_back(0);
  seen[0] = 1;
  index_t depth = 0;
  index_t result = 0;
  for (index_t head = 0; head < queue.size(); ++depth) {
    const index_t level_end = queue.size();
    result = depth;
    for (; head < level_end; ++head) {
      const Index u = queue[head];
      for (Index k = start[u]; k < start[u + 1]; ++k) {
        const Index w = neighbours[k];
        if (seen[w]) continue;
        seen[w] = 1;
        if (w - 1 < nrows) ++reached_rows;
        queue.push_back(w);
      }
    }
  }

  if (reached_rows == nrows) return ContractionIndex::finite(result);
  return ContractionIndex::infinite();
}

/// Breadth-first search on the reversed graph after contracting the rows
/// flagged in `contracted` into vertex 0. Vertex v + 1 stands for row/column v.
///
/// `for_each_edge(i, f)` must call f(j) for every column j with a nonzero
/// entry in row i, and is invoked twice per row. `max_edges` bounds the
/// number of edges and selects the index width.
template <class ForEachEdge>
ContractionIndex contracted_bfs(index_t nrows, index_t ncols,
                                std::span<const std::uint8_t> contracted,
                                ForEachEdge&& for_each_edge, bool prune, index_t max_edges) {
  const index_t padded = nrows > ncols ? nrows : ncols;
  if (padded + 2 < 0xffffffffu && max_edges < 0xffffffffu) {
    return contracted_bfs_impl<std::uint32_t>(nrows, ncols, contracted, for_each_edge, prune);
  }
  return contracted_bfs_impl<index_t>(nrows, ncols, contracted, for_each_edge, prune);
}

/// Index of contraction from a precomputed row classification, without
/// re-validating B.
ContractionIndex index_from_classes(const CsrMatrix& B, std::span<const std::uint8_t> contracted,
                                    bool prune = true);

/// Dense index of contraction. With `validate` set, negative entries and
/// row-sums above 1 + tol throw NotSubstochastic.
ContractionIndex dense_index(const DenseMatrix& B, const Tolerance& tol, bool validate);

}  // namespace mcheck::detail
