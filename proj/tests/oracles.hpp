#pragma once

// Slow, obviously-correct reference implementations used only by tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;

inline Matrix random_matrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

// log p for the two candidates, written from the definitions.
inline double log_p(double s, bool super) {
  const double lc = std::log(std::cosh(s));
  return super ? -2.0 * lc : -(0.5 * s * s - lc);
}

// (1/N) sum_i sum_j log p_j(w_j . z_i) + log|det W| as a plain double loop.
inline double loglik(const Matrix& w, const Matrix& z, const std::vector<bool>& super) {
  double total = 0.0;
  for (int i = 0; i < z.rows(); ++i) {
    for (int j = 0; j < w.rows(); ++j) {
      double y = 0.0;
      for (int k = 0; k < w.cols(); ++k) y += w(j, k) * z(i, k);
      total += log_p(y, super[static_cast<std::size_t>(j)]);
    }
  }
  return total / static_cast<double>(z.rows()) + std::log(std::abs(w.determinant()));
}

// Central differences of f at x, entry by entry.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x,
                          double h = 1e-6) {
  Matrix g(x.rows(), x.cols());
  for (int i = 0; i < x.rows(); ++i) {
    for (int j = 0; j < x.cols(); ++j) {
      Matrix a = x, b = x;
      a(i, j) += h;
      b(i, j) -= h;
      g(i, j) = (f(a) - f(b)) / (2.0 * h);
    }
  }
  return g;
}

inline double soft_threshold(double x, double c) {
  if (x > c) return x - c;
  if (x < -c) return x + c;
  return 0.0;
}

// Minimum of sum_j 1/|m(p[j], j)| over all permutations (zero entries 1e12).
inline double best_permutation_cost(const Matrix& m) {
  const int d = static_cast<int>(m.rows());
  std::vector<int> p(static_cast<std::size_t>(d));
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (int j = 0; j < d; ++j) {
      const double a = std::abs(m(p[static_cast<std::size_t>(j)], j));
      c += a > 0.0 ? std::min(1.0 / a, 1e12) : 1e12;
    }
    best = std::min(best, c);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

// Cycle detection by three-colour DFS on the graph j -> k for b(k, j) != 0.
inline bool has_cycle(const Matrix& b) {
  const int d = static_cast<int>(b.rows());
  std::vector<int> colour(static_cast<std::size_t>(d), 0);
  std::function<bool(int)> visit = [&](int j) {
    colour[static_cast<std::size_t>(j)] = 1;
    for (int k = 0; k < d; ++k) {
      if (b(k, j) == 0.0) continue;
      const int c = colour[static_cast<std::size_t>(k)];
      if (c == 1) return true;
      if (c == 0 && visit(k)) return true;
    }
    colour[static_cast<std::size_t>(j)] = 2;
    return false;
  };
  for (int j = 0; j < d; ++j) {
    if (colour[static_cast<std::size_t>(j)] == 0 && visit(j)) return true;
  }
  return false;
}

// Smallest number of nonzero entries whose removal makes b acyclic,
// by trying every subset (small instances only).
inline int min_edges_to_remove(const Matrix& b) {
  std::vector<std::pair<int, int>> nz;
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      if (b(i, j) != 0.0) nz.emplace_back(i, j);
  const int e = static_cast<int>(nz.size());
  int best = e;
  for (long mask = 0; mask < (1L << e); ++mask) {
    const int count = __builtin_popcountl(static_cast<unsigned long>(mask));
    if (count >= best) continue;
    Matrix c = b;
    for (int t = 0; t < e; ++t)
      if (mask & (1L << t)) c(nz[static_cast<std::size_t>(t)].first, nz[static_cast<std::size_t>(t)].second) = 0.0;
    if (!has_cycle(c)) best = count;
  }
  return best;
}

// ||P^T W - I||_F^2 minimised over a grid of rotations and reflections.
inline double procrustes_grid_min(const Matrix& w, int steps = 360) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < steps; ++k) {
    const double t = 2.0 * M_PI * k / steps;
    const double c = std::cos(t), s = std::sin(t);
    Matrix rot(2, 2), refl(2, 2);
    rot << c, -s, s, c;
    refl << c, s, s, -c;
    for (const Matrix* p : {&rot, &refl}) {
      best = std::min(best, (p->transpose() * w - Matrix::Identity(2, 2)).squaredNorm());
    }
  }
  return best;
}

}  // namespace oracle
