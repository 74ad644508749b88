#pragma once

#include <span>

#include "sparse_lingam/types.hpp"

namespace sparse_lingam {

/// Structure-recovery scores of an estimate against the truth. An edge is an
/// exactly nonzero entry; B(k, j) != 0 means j -> k.
struct MetricsReport {
  double distance = 0.0;  // ||B_hat - B_true||_F
  long shd = 0;           // additions + deletions + reversals (one per pair)
  double fdr = 0.0;       // (false positives + reversed) / max(1, estimated)
  double tpr = 0.0;       // true positives / max(1, true edges)
  long estimated_edges = 0;
  long true_edges = 0;
};

MetricsReport evaluate(const Matrix& b_hat, const Matrix& b_true);

/// Five-number summary; quartiles by linear interpolation between order
/// statistics.
struct Summary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Quantile in [0, 1] with linear interpolation (p = 0.5 gives the usual
/// median). Throws on empty input.
double quantile(std::span<const double> values, double p);
Summary summarize(std::span<const double> values);

}  // namespace sparse_lingam
