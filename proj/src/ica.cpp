#include "sparse_lingam/ica.hpp"

#include <cmath>
#include <string>

#include "sparse_lingam/errors.hpp"

namespace sparse_lingam {

namespace {

constexpr double kMinAbsDet = 1e-300;

double log_cosh(double s) {
  const double a = std::abs(s);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

double log_abs_det(const Matrix& w) {
  const Eigen::PartialPivLU<Matrix> lu(w);
  double acc = 0.0;
  const auto& packed = lu.matrixLU();
  for (Index k = 0; k < packed.rows(); ++k) {
    const double pivot = std::abs(packed(k, k));
    if (!(pivot > 0.0)) {
      throw Error(ErrorKind::singular, "demixing matrix is singular");
    }
    acc += std::log(pivot);
  }
  if (acc < std::log(kMinAbsDet)) {
    throw Error(ErrorKind::singular, "demixing matrix is numerically singular");
  }
  return acc;
}

void check_kinds(const Matrix& w, const Matrix& z, const DensityKinds& kinds) {
  if (w.rows() != w.cols() || z.cols() != w.cols() ||
      static_cast<Index>(kinds.size()) != w.rows()) {
    throw Error(ErrorKind::parameter, "dimension mismatch in ICA inputs");
  }
}

// tanh through exp(-2|x|), which vectorizes; absolute error ~1e-16.
Eigen::ArrayXd tanh_array(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  const Eigen::ArrayXd e = (-2.0 * x.abs()).exp();
  return x.sign() * (1.0 - e) / (1.0 + e);
}

// sum_i log cosh(x_i), with log cosh(s) = |s| + log(1 + exp(-2|s|)) - log 2.
double sum_log_cosh(const Eigen::Ref<const Eigen::ArrayXd>& x) {
  const Eigen::ArrayXd a = x.abs();
  return (a + (1.0 + (-2.0 * a).exp()).log()).sum() -
         static_cast<double>(x.size()) * std::log(2.0);
}

// Elementwise score g applied per column of Y (column j is component j).
Matrix score_matrix(const Matrix& y, const DensityKinds& kinds) {
  Matrix g(y.rows(), y.cols());
  for (Index j = 0; j < y.cols(); ++j) {
    const Eigen::ArrayXd t = tanh_array(y.col(j).array());
    if (kinds[static_cast<std::size_t>(j)] == Density::super_gaussian) {
      g.col(j) = -2.0 * t;
    } else {
      g.col(j) = t - y.col(j).array();
    }
  }
  return g;
}

}  // namespace

const char* to_string(Density kind) noexcept {
  return kind == Density::super_gaussian ? "super_gaussian" : "sub_gaussian";
}

double log_density(double s, Density kind) {
  if (kind == Density::super_gaussian) return -2.0 * log_cosh(s);
  return -(0.5 * s * s - log_cosh(s));
}

Score score_function(double s, Density kind) {
  const double t = std::tanh(s);
  const double sech2 = 1.0 - t * t;
  if (kind == Density::super_gaussian) return {-2.0 * t, -2.0 * sech2};
  return {-s + t, -1.0 + sech2};
}

DensitySelection select_density(std::span<const double> samples) {
  DensitySelection out;
  if (samples.empty()) {
    out.nonidentifiable = true;
    return out;
  }
  const auto n = static_cast<double>(samples.size());
  double sum_super = 0.0;
  double sum_sub = 0.0;
  double sq_super = 0.0;
  double sq_sub = 0.0;
  for (const double s : samples) {
    const auto sup = score_function(s, Density::super_gaussian);
    const auto sub = score_function(s, Density::sub_gaussian);
    const double a = s * sup.g - sup.g_prime;
    const double b = s * sub.g - sub.g_prime;
    sum_super += a;
    sum_sub += b;
    sq_super += a * a;
    sq_sub += b * b;
  }
  out.super_statistic = sum_super / n;
  out.sub_statistic = sum_sub / n;

  // Ties go to super_gaussian.
  const bool pick_sub = out.sub_statistic > out.super_statistic;
  out.kind = pick_sub ? Density::sub_gaussian : Density::super_gaussian;
  const double stat = pick_sub ? out.sub_statistic : out.super_statistic;
  const double mean_sq = (pick_sub ? sq_sub : sq_super) / n;
  const double variance = std::max(0.0, mean_sq - stat * stat);
  const double standard_error = std::sqrt(variance / n);
  out.nonidentifiable = stat <= 3.0 * standard_error;
  return out;
}

std::vector<DensitySelection> select_densities(const Matrix& y) {
  std::vector<DensitySelection> out;
  out.reserve(static_cast<std::size_t>(y.cols()));
  for (Index j = 0; j < y.cols(); ++j) {
    const Vector col = y.col(j);
    out.push_back(select_density(
        std::span<const double>(col.data(), static_cast<std::size_t>(col.size()))));
  }
  return out;
}

DensityKinds kinds_of(const std::vector<DensitySelection>& selections) {
  DensityKinds kinds;
  kinds.reserve(selections.size());
  for (const auto& s : selections) kinds.push_back(s.kind);
  return kinds;
}

double log_likelihood(const Matrix& w, const Matrix& z,
                      const DensityKinds& kinds) {
  check_kinds(w, z, kinds);
  const double logdet = log_abs_det(w);
  const Matrix y = z * w.transpose();
  double total = 0.0;
  for (Index j = 0; j < y.cols(); ++j) {
    const auto kind = kinds[static_cast<std::size_t>(j)];
    const auto col = y.col(j).array();
    const double lc = sum_log_cosh(col);
    if (kind == Density::super_gaussian) {
      total += -2.0 * lc;
    } else {
      total += -(0.5 * col.square().sum() - lc);
    }
  }
  return total / static_cast<double>(z.rows()) + logdet;
}

Matrix grad_negloglik(const Matrix& w, const Matrix& z,
                      const DensityKinds& kinds) {
  check_kinds(w, z, kinds);
  log_abs_det(w);  // singularity check
  const Matrix y = z * w.transpose();
  const Matrix g = score_matrix(y, kinds);
  const Matrix inv_t = w.inverse().transpose();
  return -(g.transpose() * z) / static_cast<double>(z.rows()) - inv_t;
}

Matrix natural_gradient(const Matrix& w, const Matrix& z,
                        const DensityKinds& kinds, const LagrangianTerms& terms) {
  check_kinds(w, z, kinds);
  const Matrix y = z * w.transpose();
  const Matrix g = score_matrix(y, kinds);
  const Matrix wtw = w.transpose() * w;

  Matrix moment = (g.transpose() * y) / static_cast<double>(z.rows());
  moment.diagonal().array() += 1.0;
  Matrix out = -moment * w;

  if (terms.ortho_weight != 0.0) {
    out.noalias() += terms.ortho_weight * (w - terms.p) * wtw;
  }
  const Matrix coupling =
      terms.u + terms.rho * (w * terms.unwhitening - terms.m);
  out.noalias() += coupling * (terms.unwhitening.transpose() * wtw);
  return out;
}

Matrix tangent_project(const Matrix& w, const Matrix& delta) {
  Matrix out = delta;
  for (Index j = 0; j < w.rows(); ++j) {
    const double norm2 = w.row(j).squaredNorm();
    if (norm2 > 0.0) {
      out.row(j) -= (w.row(j).dot(delta.row(j)) / norm2) * w.row(j);
    }
  }
  return out;
}

Matrix row_normalize(const Matrix& w) {
  Matrix out = w;
  for (Index j = 0; j < w.rows(); ++j) {
    const double norm = w.row(j).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw Error(ErrorKind::degenerate,
                  "row " + std::to_string(j) + " has zero or non-finite norm");
    }
    out.row(j) /= norm;
  }
  return out;
}

}  // namespace sparse_lingam
