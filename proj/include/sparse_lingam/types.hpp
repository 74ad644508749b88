#pragma once

#include <Eigen/Dense>

namespace sparse_lingam {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Largest absolute entry, 0 for an empty matrix.
inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace sparse_lingam
