#include "sparse_lingam/model_select.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "sparse_lingam/errors.hpp"

namespace sparse_lingam {

AlphaGrid AlphaGrid::log_space(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1 || (count > 1 && hi == lo)) {
    throw Error(ErrorKind::parameter, "alpha grid needs 0 < lo < hi and count >= 1");
  }
  AlphaGrid grid;
  grid.log_spaced = true;
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    grid.values.push_back(std::pow(10.0, a + t * (b - a)));
  }
  grid.validate();
  return grid;
}

AlphaGrid AlphaGrid::standard() { return log_space(1e-3, std::pow(10.0, -0.5), 50); }

AlphaGrid AlphaGrid::parse(const std::string& spec) {
  std::istringstream in(spec);
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  char c1 = 0;
  char c2 = 0;
  if (!(in >> lo >> c1 >> hi >> c2 >> count) || c1 != ':' || c2 != ':' ||
      !(in >> std::ws).eof()) {
    throw Error(ErrorKind::parameter,
                "alpha grid must look like lo:hi:count, got '" + spec + "'");
  }
  return log_space(lo, hi, count);
}

void AlphaGrid::validate() const {
  if (values.empty()) throw Error(ErrorKind::parameter, "alpha grid is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || values[i] >= 1.0) {
      throw Error(ErrorKind::parameter, "alpha grid values must lie in (0, 1)");
    }
    if (i > 0 && !(values[i] > values[i - 1])) {
      throw Error(ErrorKind::parameter, "alpha grid must be strictly increasing");
    }
  }
}

AdaptiveWeights adaptive_weights(const Matrix& m0, double gamma, double cap) {
  if (!(cap > 0.0)) throw Error(ErrorKind::parameter, "weight cap must be > 0");
  AdaptiveWeights out;
  out.cap = cap;
  out.c.resize(m0.rows(), m0.cols());
  for (Index k = 0; k < m0.cols(); ++k) {
    for (Index j = 0; j < m0.rows(); ++j) {
      const double a = std::abs(m0(j, k));
      const double c = a > 0.0 ? std::min(1.0 / a, cap) : cap;
      out.c(j, k) = std::pow(c, gamma);
    }
  }
  return out;
}

double initial_alpha(Index d) { return d < 50 ? 0.0 : 0.1; }

SolverState initial_estimate(const Whitening& whitening, SolverConfig cfg,
                             std::uint64_t seed) {
  const Index d = whitening.rotation.rows();
  cfg.gamma = 0.0;
  cfg.alpha = initial_alpha(d);
  // From a random start the rows are still mixtures early on; keep
  // re-selecting densities for the whole fit.
  cfg.density_updates = cfg.max_outer;
  FitStart start;
  start.seed = seed;
  return fit(whitening, cfg, Matrix::Ones(d, d), start);
}

Matrix start_from_estimate(const Matrix& m0, const Whitening& whitening) {
  return row_normalize(m0 * whitening.rotation * whitening.scales.asDiagonal());
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::selection, "median of empty set");
  std::sort(values.begin(), values.end());
  return values[(values.size() - 1) / 2];
}

std::vector<int> assign_folds(Index n, int k, std::uint64_t seed) {
  if (k < 2 || n < 2 * static_cast<Index>(k)) {
    throw Error(ErrorKind::parameter, "cross-validation needs K >= 2 and N >= 2K");
  }
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);

  std::vector<int> fold(static_cast<std::size_t>(n));
  const Index base = n / k;
  const Index extra = n % k;
  std::size_t pos = 0;
  for (int f = 0; f < k; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    for (Index i = 0; i < size; ++i) fold[static_cast<std::size_t>(idx[pos++])] = f;
  }
  return fold;
}

namespace {

Matrix select_rows(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = x.row(rows[i]);
  }
  return out;
}

FoldPath run_fold(const Matrix& x, const std::vector<int>& folds, int fold,
                  const AlphaGrid& grid, const SolverConfig& cfg,
                  const Matrix& weights, const Matrix& m0,
                  const CvOptions& options) {
  std::vector<Index> train;
  std::vector<Index> held;
  for (std::size_t i = 0; i < folds.size(); ++i) {
    (folds[i] == fold ? held : train).push_back(static_cast<Index>(i));
  }
  FoldPath path;
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  path.heldout_loglik.assign(grid.values.size(), nan);
  path.converged.assign(grid.values.size(), 0);

  Whitening wh;
  try {
    wh = whiten(select_rows(x, train));
  } catch (const Error&) {
    path.failed = true;
    return path;
  }
  const Matrix z_held = wh.apply(select_rows(x, held));

  Matrix fold_m0 = m0;
  Matrix fold_weights = weights;
  if (options.refit_initial) {
    try {
      fold_m0 = initial_estimate(wh, cfg, options.seed + 1 + static_cast<std::uint64_t>(fold)).m;
      fold_weights = adaptive_weights(fold_m0, cfg.gamma, options.weight_cap).c;
    } catch (const Error&) {
      path.failed = true;
      return path;
    }
  }

  FitStart start;
  start.w = start_from_estimate(fold_m0, wh);
  for (std::size_t a = 0; a < grid.values.size(); ++a) {
    SolverConfig local = cfg;
    local.alpha = grid.values[a];
    try {
      const SolverState state = fit(wh, local, fold_weights, start);
      path.heldout_loglik[a] = log_likelihood(state.w, z_held, state.kinds);
      path.converged[a] = state.converged ? 1 : 0;
      start.w = state.w;
      start.u = state.u;
    } catch (const Error&) {
      // Leave NaN and keep warm-starting from the last good solution.
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < grid.values.size(); ++a) {
    const double v = path.heldout_loglik[a];
    if (std::isfinite(v) && v > best) {
      best = v;
      path.argmax_index = static_cast<int>(a);
    }
  }
  if (path.argmax_index < 0) {
    path.failed = true;
  } else {
    path.argmax_alpha = grid.values[static_cast<std::size_t>(path.argmax_index)];
  }
  return path;
}

}  // namespace

CvResult cv_select_alpha(const Dataset& data, const AlphaGrid& grid,
                         const SolverConfig& cfg, const Matrix& weights,
                         const Matrix& m0, const CvOptions& options) {
  grid.validate();
  const auto folds = assign_folds(data.n_samples(), options.k_folds, options.seed);

  CvResult result;
  result.folds.resize(static_cast<std::size_t>(options.k_folds));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int f = next++; f < options.k_folds; f = next++) {
      result.folds[static_cast<std::size_t>(f)] =
          run_fold(data.values, folds, f, grid, cfg, weights, m0, options);
    }
  };
  const int jobs = std::clamp(options.jobs, 1, options.k_folds);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<double> argmaxes;
  for (const auto& f : result.folds) {
    if (!f.failed) argmaxes.push_back(f.argmax_alpha);
  }
  if (argmaxes.empty()) {
    throw Error(ErrorKind::selection, "every cross-validation fold failed");
  }
  result.selected_alpha = lower_median(std::move(argmaxes));
  return result;
}

EscalationResult escalate_alpha(const Whitening& whitening, double alpha,
                                const AlphaGrid& grid, const SolverConfig& cfg,
                                const Matrix& weights, const Matrix& start_w,
                                double omega1, double omega2) {
  std::vector<double> candidates{alpha};
  for (const double a : grid.values) {
    if (a > alpha * (1.0 + 1e-12)) candidates.push_back(a);
  }

  EscalationResult out;
  FitStart start;
  start.w = start_w;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    SolverConfig local = cfg;
    local.alpha = candidates[i];
    out.state = fit(whitening, local, weights, start);
    out.estimate = postprocess(out.state.m, omega2);
    out.alpha = candidates[i];
    out.steps.push_back({out.alpha, out.estimate.cutoff_applied, out.state.converged});
    if (out.estimate.cutoff_applied <= omega1) {
      out.cutoff_violating = false;
      return out;
    }
    start.w = out.state.w;
    start.u = out.state.u;
  }
  out.cutoff_violating = true;
  return out;
}

}  // namespace sparse_lingam
