#include "sparse_lingam/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sparse_lingam/errors.hpp"

namespace sparse_lingam {

namespace {

constexpr double kZeroCost = 1e12;

double reciprocal_cost(double v) {
  const double a = std::abs(v);
  return a > 0.0 ? std::min(1.0 / a, kZeroCost) : kZeroCost;
}

// Kuhn-Munkres with potentials, O(n^3). cost(i, j): cost of giving column j
// to row i. Returns, for each column, the row assigned to it.
std::vector<Index> solve_assignment(const Matrix& cost) {
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based with a virtual row/column 0.
  std::vector<double> row_pot(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<double> col_pot(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> col_owner(static_cast<std::size_t>(n + 1), 0);
  std::vector<Index> way(static_cast<std::size_t>(n + 1), 0);

  for (Index i = 1; i <= n; ++i) {
    col_owner[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = col_owner[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) continue;
        const double cur = cost(i0 - 1, j - 1) -
                           row_pot[static_cast<std::size_t>(i0)] - col_pot[js];
        if (cur < minv[js]) {
          minv[js] = cur;
          way[js] = j0;
        }
        if (minv[js] < delta) {
          delta = minv[js];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (used[js]) {
          row_pot[static_cast<std::size_t>(col_owner[js])] += delta;
          col_pot[js] -= delta;
        } else {
          minv[js] -= delta;
        }
      }
      j0 = j1;
    } while (col_owner[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      col_owner[static_cast<std::size_t>(j0)] =
          col_owner[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> rows(static_cast<std::size_t>(n));
  for (Index j = 1; j <= n; ++j) {
    rows[static_cast<std::size_t>(j - 1)] = col_owner[static_cast<std::size_t>(j)] - 1;
  }
  return rows;
}

struct Entry {
  double magnitude;
  Index row;
  Index col;
};

}  // namespace

RowPermutation best_diagonal_permutation(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::parameter, "permutation search needs a square matrix");
  }
  Matrix cost(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) cost(i, j) = reciprocal_cost(m(i, j));
  }
  RowPermutation perm;
  perm.rows = solve_assignment(cost);
  for (Index j = 0; j < m.cols(); ++j) {
    if (m(perm.rows[static_cast<std::size_t>(j)], j) == 0.0) perm.degenerate = true;
  }
  return perm;
}

double diagonal_cost(const Matrix& m, const std::vector<Index>& rows) {
  double total = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    total += reciprocal_cost(m(rows[static_cast<std::size_t>(j)], j));
  }
  return total;
}

Matrix rescale_to_B(const Matrix& m, const RowPermutation& perm) {
  const Index d = m.rows();
  Matrix b(d, d);
  for (Index j = 0; j < d; ++j) {
    const Index src = perm.rows[static_cast<std::size_t>(j)];
    const double diag = m(src, j);
    if (diag == 0.0) {
      throw Error(ErrorKind::degenerate,
                  "zero diagonal entry in column " + std::to_string(j) +
                      " after permutation");
    }
    b.row(j) = -m.row(src) / diag;
    b(j, j) = 0.0;
  }
  return b;
}

AcyclicityResult is_acyclic(const Matrix& b) {
  const Index d = b.rows();
  // parents[k]: nonzero entries in row k among the remaining variables,
  // including a nonzero diagonal (a self loop never clears).
  std::vector<Index> parents(static_cast<std::size_t>(d), 0);
  for (Index k = 0; k < d; ++k) {
    for (Index j = 0; j < d; ++j) {
      if (b(k, j) != 0.0) ++parents[static_cast<std::size_t>(k)];
    }
  }
  std::vector<char> removed(static_cast<std::size_t>(d), 0);
  AcyclicityResult out;
  out.order.reserve(static_cast<std::size_t>(d));
  for (Index step = 0; step < d; ++step) {
    Index next = -1;
    for (Index k = 0; k < d; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      if (!removed[ks] && parents[ks] == 0) {
        next = k;
        break;
      }
    }
    if (next < 0) {
      out.order.clear();
      return out;
    }
    removed[static_cast<std::size_t>(next)] = 1;
    out.order.push_back(next);
    for (Index k = 0; k < d; ++k) {
      if (!removed[static_cast<std::size_t>(k)] && b(k, next) != 0.0) {
        --parents[static_cast<std::size_t>(k)];
      }
    }
  }
  out.acyclic = true;
  return out;
}

PruneResult prune_to_dag(const Matrix& b) {
  if (is_acyclic(b).acyclic) return {b, 0.0};

  std::vector<Entry> entries;
  for (Index j = 0; j < b.rows(); ++j) {
    for (Index k = 0; k < b.cols(); ++k) {
      if (b(j, k) != 0.0) entries.push_back({std::abs(b(j, k)), j, k});
    }
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    if (x.magnitude != y.magnitude) return x.magnitude < y.magnitude;
    if (x.row != y.row) return x.row < y.row;
    return x.col < y.col;
  });

  auto zero_first = [&](std::size_t count) {
    Matrix out = b;
    for (std::size_t i = 0; i < count; ++i) out(entries[i].row, entries[i].col) = 0.0;
    return out;
  };

  // Removing a longer prefix only deletes edges, so acyclicity is monotone in
  // the prefix length and the first acyclic prefix can be bisected.
  std::size_t lo = 1;
  std::size_t hi = entries.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (is_acyclic(zero_first(mid)).acyclic) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return {zero_first(lo), entries[lo - 1].magnitude};
}

Matrix final_truncate(const Matrix& b, double omega2) {
  Matrix out = b;
  for (Index k = 0; k < out.cols(); ++k) {
    for (Index j = 0; j < out.rows(); ++j) {
      if (std::abs(out(j, k)) < omega2) out(j, k) = 0.0;
    }
  }
  return out;
}

AdjacencyEstimate postprocess(const Matrix& m, double omega2) {
  AdjacencyEstimate est;
  const auto perm = best_diagonal_permutation(m);
  est.degenerate_permutation = perm.degenerate;
  auto pruned = prune_to_dag(rescale_to_B(m, perm));
  est.cutoff_applied = pruned.cutoff;
  est.b = omega2 > 0.0 ? final_truncate(pruned.b, omega2) : std::move(pruned.b);
  est.truncated = omega2 > 0.0;
  const auto acyclic = is_acyclic(est.b);
  est.acyclic = acyclic.acyclic;
  est.causal_order = acyclic.order;
  return est;
}

}  // namespace sparse_lingam
