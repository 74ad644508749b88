#include "sparse_lingam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sparse_lingam/errors.hpp"

namespace sparse_lingam {

MetricsReport evaluate(const Matrix& b_hat, const Matrix& b_true) {
  if (b_hat.rows() != b_true.rows() || b_hat.cols() != b_true.cols() ||
      b_hat.rows() != b_hat.cols()) {
    throw Error(ErrorKind::parameter, "metric inputs must be square and same size");
  }
  const Index d = b_hat.rows();
  MetricsReport r;
  r.distance = (b_hat - b_true).norm();

  long true_pos = 0;
  long reversed = 0;
  long false_pos = 0;
  for (Index k = 0; k < d; ++k) {
    for (Index j = 0; j < d; ++j) {
      if (j == k) continue;
      const bool est = b_hat(k, j) != 0.0;
      const bool tru = b_true(k, j) != 0.0;
      r.estimated_edges += est;
      r.true_edges += tru;
      if (!est) continue;
      if (tru) {
        ++true_pos;
      } else if (b_true(j, k) != 0.0) {
        ++reversed;
      } else {
        ++false_pos;
      }
    }
  }

  // One unordered pair at a time: a single reversed edge is one step,
  // otherwise every directed mismatch is one addition or deletion.
  for (Index k = 0; k < d; ++k) {
    for (Index j = k + 1; j < d; ++j) {
      const bool est_kj = b_hat(k, j) != 0.0;
      const bool est_jk = b_hat(j, k) != 0.0;
      const bool tru_kj = b_true(k, j) != 0.0;
      const bool tru_jk = b_true(j, k) != 0.0;
      const int mismatches = (est_kj != tru_kj) + (est_jk != tru_jk);
      const bool reversal = est_kj != est_jk && tru_kj != tru_jk && est_kj == tru_jk;
      r.shd += reversal ? 1 : mismatches;
    }
  }

  r.fdr = static_cast<double>(false_pos + reversed) /
          static_cast<double>(std::max(1L, r.estimated_edges));
  r.tpr = static_cast<double>(true_pos) /
          static_cast<double>(std::max(1L, r.true_edges));
  return r;
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::parameter, "quantile of empty set");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  s.median = quantile(values, 0.5);
  s.q1 = quantile(values, 0.25);
  s.q3 = quantile(values, 0.75);
  s.min = *std::min_element(values.begin(), values.end());
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

}  // namespace sparse_lingam
