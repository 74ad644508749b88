#include "sparse_lingam/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "sparse_lingam/errors.hpp"

namespace sparse_lingam {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::parameter, what);
}

LagrangianTerms terms_for(const SolverState& state, const Matrix& unwhitening,
                          const SolverConfig& cfg) {
  return {unwhitening, state.m, state.u, state.p,
          cfg.lambda * (1.0 - cfg.alpha), cfg.rho};
}

double lagrangian_at(const Matrix& w, const SolverState& state,
                     const Whitening& whitening, const SolverConfig& cfg) {
  const Matrix a = whitening.unwhitening();
  const Index d = w.rows();
  const double loglik = log_likelihood(w, whitening.whitened, state.kinds);
  const double ortho =
      (state.p.transpose() * w - Matrix::Identity(d, d)).squaredNorm();
  const double l1 = (state.c.array() * state.m.array().abs()).sum();
  const Matrix r = w * a - state.m;
  return -loglik + cfg.lambda * (1.0 - cfg.alpha) * 0.5 * ortho +
         cfg.lambda * cfg.alpha * l1 + (state.u.array() * r.array()).sum() +
         0.5 * cfg.rho * r.squaredNorm();
}

}  // namespace

void SolverConfig::validate() const {
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be >= 0");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be >= 0");
  require(std::isfinite(rho) && rho > 0.0, "rho must be > 0");
  require(std::isfinite(eta) && eta > 0.0, "eta must be > 0");
  require(u_max >= 1, "u_max must be >= 1");
  require(tol_primal > 0.0, "tol_primal must be > 0");
  require(tol_w > 0.0, "tol_w must be > 0");
  require(max_outer >= 1, "max_outer must be >= 1");
  require(density_updates >= 0, "density_updates must be >= 0");
}

Matrix update_P(const Matrix& w) {
  if (!w.allFinite()) {
    throw Error(ErrorKind::divergence, "Procrustes step on non-finite matrix");
  }
  const Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix soft_threshold(const Matrix& x, const Matrix& thresholds) {
  Matrix out(x.rows(), x.cols());
  for (Index k = 0; k < x.cols(); ++k) {
    for (Index j = 0; j < x.rows(); ++j) {
      const double v = x(j, k);
      const double c = thresholds(j, k);
      if (v > c) {
        out(j, k) = v - c;
      } else if (v < -c) {
        out(j, k) = v + c;
      } else {
        out(j, k) = 0.0;
      }
    }
  }
  return out;
}

double augmented_lagrangian(const SolverState& state, const Whitening& whitening,
                            const SolverConfig& cfg) {
  return lagrangian_at(state.w, state, whitening, cfg);
}

Matrix lagrangian_gradient(const SolverState& state, const Whitening& whitening,
                           const SolverConfig& cfg) {
  const Matrix a = whitening.unwhitening();
  const Index d = state.w.rows();
  Matrix grad = grad_negloglik(state.w, whitening.whitened, state.kinds);
  grad += cfg.lambda * (1.0 - cfg.alpha) * state.p *
          (state.p.transpose() * state.w - Matrix::Identity(d, d));
  grad += (state.u + cfg.rho * (state.w * a - state.m)) * a.transpose();
  return grad;
}

Matrix descent_direction(const Matrix& w, const SolverState& state,
                         const Whitening& whitening, const SolverConfig& cfg) {
  const Matrix a = whitening.unwhitening();
  return tangent_project(
      w, natural_gradient(w, whitening.whitened, state.kinds,
                          terms_for(state, a, cfg)));
}

Matrix update_W(SolverState& state, const Whitening& whitening,
                const SolverConfig& cfg) {
  const Matrix a = whitening.unwhitening();
  const auto terms = terms_for(state, a, cfg);
  const double before = augmented_lagrangian(state, whitening, cfg);

  Matrix w = state.w;
  for (int u = 0; u < cfg.u_max; ++u) {
    const Matrix step =
        tangent_project(w, natural_gradient(w, whitening.whitened, state.kinds, terms));
    Matrix next = w - cfg.eta * step;
    if (!next.allFinite()) {
      throw Error(ErrorKind::divergence,
                  "W iterate became non-finite; try a smaller eta");
    }
    const double change = max_abs(next - w);
    w = std::move(next);
    ++state.inner_iterations;
    if (change < cfg.tol_w) break;
  }
  w = row_normalize(w);

  double after = std::numeric_limits<double>::infinity();
  try {
    after = lagrangian_at(w, state, whitening, cfg);
  } catch (const Error& e) {
    throw Error(ErrorKind::divergence,
                std::string("W step left the feasible set (") + e.what() +
                    "); try a smaller eta");
  }
  if (!std::isfinite(after) ||
      after > before + 10.0 * std::max(1.0, std::abs(before))) {
    throw Error(ErrorKind::divergence,
                "augmented Lagrangian blew up in the W step; try a smaller eta");
  }
  return w;
}

Matrix update_M(const SolverState& state, const Whitening& whitening,
                const SolverConfig& cfg) {
  const Matrix a = whitening.unwhitening();
  const Matrix target = state.w * a + state.u / cfg.rho;
  return soft_threshold(target, (cfg.lambda * cfg.alpha / cfg.rho) * state.c);
}

Matrix update_U(const SolverState& state, const Whitening& whitening,
                const SolverConfig& cfg) {
  const Matrix a = whitening.unwhitening();
  return state.u + cfg.rho * (state.w * a - state.m);
}

Matrix random_orthogonal(Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(d, d);
  for (Index k = 0; k < d; ++k) {
    for (Index j = 0; j < d; ++j) g(j, k) = normal(rng);
  }
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return q;
}

SolverState fit(const Whitening& whitening, const SolverConfig& cfg,
                const Matrix& weights, const FitStart& start) {
  cfg.validate();
  const Index d = whitening.rotation.rows();
  require(weights.rows() == d && weights.cols() == d,
          "weight matrix has wrong shape");
  require(weights.allFinite() && (weights.array() >= 0.0).all(),
          "weights must be finite and nonnegative");
  require(start.w.size() == 0 || (start.w.rows() == d && start.w.cols() == d),
          "initial W has wrong shape");
  require(start.u.size() == 0 || (start.u.rows() == d && start.u.cols() == d),
          "initial U has wrong shape");

  const Matrix a = whitening.unwhitening();
  SolverState state;
  state.w = start.w.size() == 0 ? random_orthogonal(d, start.seed)
                                : row_normalize(start.w);
  state.m = state.w * a;
  state.u = start.u.size() == 0 ? Matrix::Zero(d, d) : start.u;
  state.p = update_P(state.w);
  state.c = weights;
  state.densities = select_densities(whitening.whitened * state.w.transpose());
  state.kinds = kinds_of(state.densities);

  SolverState best;
  double best_score = std::numeric_limits<double>::infinity();

  for (int t = 0; t < cfg.max_outer; ++t) {
    if (t > 0 && t < cfg.density_updates) {
      state.densities = select_densities(whitening.whitened * state.w.transpose());
      state.kinds = kinds_of(state.densities);
    }
    state.p = update_P(state.w);
    Matrix w_next = update_W(state, whitening, cfg);
    const double w_change = max_abs(w_next - state.w);
    state.w = std::move(w_next);
    state.m = update_M(state, whitening, cfg);
    state.u = update_U(state, whitening, cfg);
    const double primal = max_abs(state.w * a - state.m);

    state.outer_iterations = t + 1;
    state.history.push_back({t + 1, primal, w_change});

    if (primal < cfg.tol_primal && w_change < cfg.tol_w) {
      state.converged = true;
      return state;
    }
    const double score = std::max(primal / cfg.tol_primal, w_change / cfg.tol_w);
    if (score < best_score) {
      best_score = score;
      best.w = state.w;
      best.m = state.m;
      best.p = state.p;
      best.u = state.u;
      best.densities = state.densities;
      best.kinds = state.kinds;
    }
  }

  // Non-convergence: hand back the best iterate with the full history.
  best.c = state.c;
  best.history = std::move(state.history);
  best.outer_iterations = state.outer_iterations;
  best.inner_iterations = state.inner_iterations;
  best.converged = false;
  return best;
}

}  // namespace sparse_lingam
