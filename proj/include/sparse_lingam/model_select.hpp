#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparse_lingam/admm.hpp"
#include "sparse_lingam/data.hpp"
#include "sparse_lingam/postprocess.hpp"

namespace sparse_lingam {

/// Strictly increasing candidate values of alpha.
struct AlphaGrid {
  std::vector<double> values;
  bool log_spaced = true;

  /// `count` points from lo to hi inclusive, evenly spaced in log10.
  static AlphaGrid log_space(double lo, double hi, int count);
  /// 50 points on [1e-3, 10^-0.5].
  static AlphaGrid standard();
  /// Parses "lo:hi:count".
  static AlphaGrid parse(const std::string& spec);

  void validate() const;
};

struct AdaptiveWeights {
  Matrix c;  // c_jk^gamma
  double cap = 1e6;
};

/// c_jk = min(1 / |m0_jk|, cap), returned raised to gamma. Zero initial
/// entries therefore carry the cap.
AdaptiveWeights adaptive_weights(const Matrix& m0, double gamma, double cap = 1e6);

/// Alpha used for the unweighted initial fit: 0 below 50 variables,
/// 0.1 from 50 on.
double initial_alpha(Index d);

/// Unweighted (gamma = 0) fit from a seeded random orthogonal start, with
/// densities re-selected at every outer iteration.
/// Returns the solver state; its `m` is the initial estimate M0.
SolverState initial_estimate(const Whitening& whitening, SolverConfig cfg,
                             std::uint64_t seed);

/// Starting W for a weighted fit: M0 mapped into the given whitening,
/// W = M0 V D, so rows stay aligned with the adaptive weights.
Matrix start_from_estimate(const Matrix& m0, const Whitening& whitening);

struct FoldPath {
  std::vector<double> heldout_loglik;  // one per grid value, NaN if failed
  std::vector<int> converged;          // 1 if the fit at that alpha converged
  int argmax_index = -1;
  double argmax_alpha = 0.0;
  bool failed = false;
};

struct CvResult {
  double selected_alpha = 0.0;
  std::vector<FoldPath> folds;
};

/// Lower median (the ceil(n/2)-th smallest value).
double lower_median(std::vector<double> values);

/// Seeded shuffle of 0..n-1 cut into K blocks whose sizes differ by at most
/// one. Returns the fold index of every row.
std::vector<int> assign_folds(Index n, int k, std::uint64_t seed);

struct CvOptions {
  int k_folds = 10;
  std::uint64_t seed = 0;
  int jobs = 1;
  /// Recompute the initial estimate and adaptive weights on each fold's
  /// training rows instead of reusing the full-data ones.
  bool refit_initial = true;
  double weight_cap = 1e6;
};

/// K-fold CV over an ascending grid. Each fold whitens its training rows,
/// sweeps the grid with warm starts, and scores the held-out rows (mapped
/// through the training whitening) by the average log-likelihood. The
/// selected alpha is the lower median of the per-fold argmaxes.
CvResult cv_select_alpha(const Dataset& data, const AlphaGrid& grid,
                         const SolverConfig& cfg, const Matrix& weights,
                         const Matrix& m0, const CvOptions& options);

struct EscalationStep {
  double alpha = 0.0;
  double cutoff = 0.0;
  bool converged = false;
};

struct EscalationResult {
  SolverState state;
  AdjacencyEstimate estimate;
  double alpha = 0.0;
  /// Grid exhausted with the cutoff still above omega1.
  bool cutoff_violating = false;
  std::vector<EscalationStep> steps;
};

/// Fits at `alpha`, post-processes, and while the acyclification cutoff
/// exceeds omega1 moves to the next larger grid value (warm start). When
/// `alpha` is not a grid value the candidates after it are the larger grid
/// values.
EscalationResult escalate_alpha(const Whitening& whitening, double alpha,
                                const AlphaGrid& grid, const SolverConfig& cfg,
                                const Matrix& weights, const Matrix& start_w,
                                double omega1, double omega2);

}  // namespace sparse_lingam
