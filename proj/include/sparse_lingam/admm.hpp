#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sparse_lingam/data.hpp"
#include "sparse_lingam/ica.hpp"
#include "sparse_lingam/types.hpp"

namespace sparse_lingam {

struct SolverConfig {
  double lambda = 0.1;   // total penalty
  double alpha = 0.0;    // sparsity share of lambda; 1 - alpha goes to orthogonality
  double gamma = 1.0;    // adaptive-lasso exponent
  double rho = 1.0;      // ADMM penalty
  double eta = 0.005;    // W learning rate
  int u_max = 10;        // inner W iterations per outer iteration
  double tol_primal = 1e-4;
  double tol_w = 1e-5;
  int max_outer = 2000;
  /// Density kinds are re-selected during the first this-many outer
  /// iterations and then frozen.
  int density_updates = 5;

  /// Throws ErrorKind::parameter on an out-of-range field.
  void validate() const;
};

struct IterationRecord {
  int iteration = 0;
  double primal_residual = 0.0;  // max |W D^{-1} V^T - M|
  double w_change = 0.0;         // max |W_{t+1} - W_t|
};

struct SolverState {
  Matrix w;  // demixing matrix in whitened coordinates, unit rows
  Matrix m;  // demixing matrix in data coordinates (sparse)
  Matrix p;  // orthogonal anchor for W
  Matrix u;  // scaled dual of W D^{-1} V^T = M
  Matrix c;  // adaptive-lasso weights c_jk^gamma
  std::vector<DensitySelection> densities;
  DensityKinds kinds;

  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  std::vector<IterationRecord> history;
};

/// Orthogonal Procrustes step: P = U_W V_W^T from the SVD of W, the
/// minimizer of ||P^T W - I||_F over orthogonal P.
Matrix update_P(const Matrix& w);

/// Entrywise soft threshold S(x; c) = sign(x) max(|x| - c, 0); entries with
/// |x| <= c are exactly zero.
Matrix soft_threshold(const Matrix& x, const Matrix& thresholds);

/// Augmented Lagrangian L_rho(W, M, U) for the current P, including the
/// (W-independent) weighted L1 term.
double augmented_lagrangian(const SolverState& state, const Whitening& whitening,
                            const SolverConfig& cfg);

/// Euclidean gradient of augmented_lagrangian with respect to W.
Matrix lagrangian_gradient(const SolverState& state, const Whitening& whitening,
                           const SolverConfig& cfg);

/// Tangent-projected natural gradient used by the W step.
Matrix descent_direction(const Matrix& w, const SolverState& state,
                         const Whitening& whitening, const SolverConfig& cfg);

/// Up to u_max steps W <- W - eta * dW, stopping once a step moves no entry
/// by tol_w or more; rows are renormalized at the end. Throws
/// ErrorKind::divergence on a non-finite iterate or a tenfold blow-up of the
/// Lagrangian.
Matrix update_W(SolverState& state, const Whitening& whitening,
                const SolverConfig& cfg);

/// M <- S(W D^{-1} V^T + U / rho; (lambda alpha / rho) C).
Matrix update_M(const SolverState& state, const Whitening& whitening,
                const SolverConfig& cfg);

/// U <- U + rho (W D^{-1} V^T - M).
Matrix update_U(const SolverState& state, const Whitening& whitening,
                const SolverConfig& cfg);

/// Random orthogonal matrix (QR of a seeded standard normal matrix).
Matrix random_orthogonal(Index d, std::uint64_t seed);

/// Where a fit starts from.
struct FitStart {
  /// Initial W (rows are normalized). Empty means random orthogonal.
  Matrix w;
  /// Optional dual warm start; zero when empty.
  Matrix u;
  std::uint64_t seed = 0;
};

/// Runs the ADMM iteration until max|W D^{-1} V^T - M| < tol_primal and
/// max|W_{t+1} - W_t| < tol_w, or max_outer is reached. In the latter case
/// `converged` is false and the iterate with the smallest scaled residual is
/// returned.
SolverState fit(const Whitening& whitening, const SolverConfig& cfg,
                const Matrix& weights, const FitStart& start = {});

}  // namespace sparse_lingam
