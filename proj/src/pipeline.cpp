#include "sparse_lingam/pipeline.hpp"

namespace sparse_lingam {

Matrix to_raw_scale(const Matrix& b, const Vector& column_scales) {
  return column_scales.asDiagonal() * b * column_scales.cwiseInverse().asDiagonal();
}

PipelineResult estimate_dag(const Dataset& raw, const PipelineConfig& cfg) {
  cfg.solver.validate();
  cfg.grid.validate();

  PipelineResult out;
  const Dataset data = standardize(raw);
  const Whitening wh = whiten(data);

  const SolverState initial = initial_estimate(wh, cfg.solver, cfg.seed);
  out.m0 = initial.m;
  out.initial_converged = initial.converged;
  const auto weights = adaptive_weights(out.m0, cfg.solver.gamma, cfg.weight_cap);

  double alpha = 0.0;
  if (cfg.fixed_alpha) {
    alpha = *cfg.fixed_alpha;
  } else {
    CvOptions cv_opts;
    cv_opts.k_folds = cfg.k_folds;
    cv_opts.seed = cfg.seed;
    cv_opts.jobs = cfg.jobs;
    cv_opts.weight_cap = cfg.weight_cap;
    out.cv = cv_select_alpha(data, cfg.grid, cfg.solver, weights.c, out.m0, cv_opts);
    alpha = out.cv->selected_alpha;
  }

  out.escalation = escalate_alpha(wh, alpha, cfg.grid, cfg.solver, weights.c,
                                  start_from_estimate(out.m0, wh), cfg.omega1,
                                  cfg.omega2);
  out.alpha = out.escalation.alpha;
  out.estimate = out.escalation.estimate;
  out.converged = out.escalation.state.converged;
  out.b_raw = to_raw_scale(out.estimate.b, data.column_scales);
  return out;
}

}  // namespace sparse_lingam
