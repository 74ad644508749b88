#pragma once

#include <span>
#include <vector>

#include "sparse_lingam/types.hpp"

namespace sparse_lingam {

/// Candidate source densities (normalization constants dropped):
///   super_gaussian: log p(s) = -2 log cosh(s)
///   sub_gaussian:   log p(s) = -(s^2 / 2 - log cosh(s))
enum class Density { super_gaussian, sub_gaussian };

using DensityKinds = std::vector<Density>;

const char* to_string(Density kind) noexcept;

struct Score {
  double g;        // d/ds log p(s)
  double g_prime;  // d^2/ds^2 log p(s)
};

double log_density(double s, Density kind);
Score score_function(double s, Density kind);

/// Outcome of the density choice for one component. The stability
/// statistic of a candidate is mean(s * g(s) - g'(s)); a positive value
/// makes the likelihood maximum locally consistent for that component.
struct DensitySelection {
  Density kind = Density::super_gaussian;
  double super_statistic = 0.0;
  double sub_statistic = 0.0;
  /// The chosen statistic is not distinguishable from zero (within three
  /// standard errors), which is the Gaussian boundary case.
  bool nonidentifiable = false;
};

DensitySelection select_density(std::span<const double> samples);

/// Selects per column of `y` (N x d estimated components).
std::vector<DensitySelection> select_densities(const Matrix& y);
DensityKinds kinds_of(const std::vector<DensitySelection>& selections);

/// Average log-likelihood per sample,
///   (1/N) sum_i sum_j log p_j(w_j^T z_i) + log|det W|.
double log_likelihood(const Matrix& w, const Matrix& z,
                      const DensityKinds& kinds);

/// Gradient of -log_likelihood with respect to W:
///   -(1/N) sum_i g(y_i) z_i^T - W^{-T}.
Matrix grad_negloglik(const Matrix& w, const Matrix& z,
                      const DensityKinds& kinds);

/// The non-likelihood parts of the augmented Lagrangian that depend on W,
/// for fixed (M, U, P):
///   (ortho_weight / 2) ||P^T W - I||_F^2
///   + tr[U^T (W A - M)] + (rho / 2) ||W A - M||_F^2,
/// where A = D^{-1} V^T is the unwhitening map and ortho_weight = lambda(1-alpha).
struct LagrangianTerms {
  const Matrix& unwhitening;
  const Matrix& m;
  const Matrix& u;
  const Matrix& p;
  double ortho_weight;
  double rho;
};

/// Natural gradient of the augmented Lagrangian in W (Euclidean gradient
/// right-multiplied by W^T W), assembled term by term:
///   -((1/N) sum_i g(y_i) y_i^T + I) W
///   + ortho_weight (W - P) W^T W
///   + {U + rho (W A - M)} A^T W^T W.
Matrix natural_gradient(const Matrix& w, const Matrix& z,
                        const DensityKinds& kinds, const LagrangianTerms& terms);

/// Removes from each row of `delta` its component along the matching row of
/// `w`, so that diag(W delta^T) = 0.
Matrix tangent_project(const Matrix& w, const Matrix& delta);

/// Scales every row to unit Euclidean norm. Throws on a zero row.
Matrix row_normalize(const Matrix& w);

}  // namespace sparse_lingam
