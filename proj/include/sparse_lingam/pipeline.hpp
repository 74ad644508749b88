#pragma once

#include <cstdint>
#include <optional>

#include "sparse_lingam/admm.hpp"
#include "sparse_lingam/data.hpp"
#include "sparse_lingam/model_select.hpp"
#include "sparse_lingam/postprocess.hpp"

namespace sparse_lingam {

struct PipelineConfig {
  SolverConfig solver;
  AlphaGrid grid = AlphaGrid::standard();
  int k_folds = 10;
  /// Skips cross-validation when set.
  std::optional<double> fixed_alpha;
  double omega1 = 0.05;
  double omega2 = 0.05;
  double weight_cap = 1e6;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct PipelineResult {
  /// Estimate in standardized coordinates (cutoffs apply here).
  AdjacencyEstimate estimate;
  /// The same graph mapped back to the raw column scales:
  /// b_raw(k, j) = b(k, j) * scale_k / scale_j.
  Matrix b_raw;
  Matrix m0;
  double alpha = 0.0;
  std::optional<CvResult> cv;
  EscalationResult escalation;
  bool initial_converged = false;
  bool converged = false;
};

/// standardize -> whiten -> initial estimate -> adaptive weights ->
/// CV for alpha (unless fixed) -> alpha escalation with post-processing.
PipelineResult estimate_dag(const Dataset& raw, const PipelineConfig& cfg);

/// Maps a standardized-coordinate adjacency matrix to raw column scales.
Matrix to_raw_scale(const Matrix& b, const Vector& column_scales);

}  // namespace sparse_lingam
