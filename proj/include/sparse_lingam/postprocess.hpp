#pragma once

#include <optional>
#include <vector>

#include "sparse_lingam/types.hpp"

namespace sparse_lingam {

/// Row permutation: row j of the permuted matrix is row `rows[j]` of the
/// original.
struct RowPermutation {
  std::vector<Index> rows;
  /// Some selected diagonal entry is exactly zero.
  bool degenerate = false;
};

/// Minimizes sum_j 1 / |M(rows[j], j)| over row permutations by solving the
/// linear assignment problem exactly. Zero entries cost 1e12.
RowPermutation best_diagonal_permutation(const Matrix& m);

/// Sum of reciprocal absolute diagonal entries after permuting rows, with
/// the same zero sentinel as best_diagonal_permutation.
double diagonal_cost(const Matrix& m, const std::vector<Index>& rows);

/// Permutes rows, divides each row by its diagonal entry and returns
/// B = I - (rescaled matrix), with an exactly zero diagonal.
Matrix rescale_to_B(const Matrix& m, const RowPermutation& perm);

struct AcyclicityResult {
  bool acyclic = false;
  /// Causal order (parents before children) when acyclic.
  std::vector<Index> order;
};

/// Repeatedly removes a variable whose row has no nonzero entries among the
/// remaining columns. Acyclic iff every variable is removed. B(k, j) != 0
/// means an edge j -> k.
AcyclicityResult is_acyclic(const Matrix& b);

struct PruneResult {
  Matrix b;
  /// Magnitude of the largest entry zeroed, 0 when nothing was removed.
  double cutoff = 0.0;
};

/// Zeroes the smallest-magnitude nonzero entries one at a time (ties in
/// row-major order) until the graph is acyclic.
PruneResult prune_to_dag(const Matrix& b);

/// Sets entries with |b| < omega2 to zero.
Matrix final_truncate(const Matrix& b, double omega2);

struct AdjacencyEstimate {
  Matrix b;
  std::vector<Index> causal_order;
  double cutoff_applied = 0.0;
  bool acyclic = false;
  bool truncated = false;
  bool degenerate_permutation = false;
};

/// Full chain: permutation, rescaling, pruning to a DAG and truncation at
/// omega2 (skipped when omega2 <= 0).
AdjacencyEstimate postprocess(const Matrix& m, double omega2);

}  // namespace sparse_lingam
