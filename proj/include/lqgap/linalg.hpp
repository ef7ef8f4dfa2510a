#pragma once

#include <Eigen/Dense>
#include <limits>

namespace lqgap {

// Spectral norm (largest singular value).
inline double spectral_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues()(0);
}

inline double smallest_singular_value(const Eigen::MatrixXd& M) {
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
  return sv(sv.size() - 1);
}

// sigma_max / sigma_min; +inf when numerically rank deficient.
inline double condition_estimate(const Eigen::MatrixXd& M) {
  const auto sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0)) return std::numeric_limits<double>::infinity();
  return sv(0) / smin;
}

// Minimum eigenvalue of the symmetric part (Q + Q^T)/2; robust to the tiny
// asymmetries rounding introduces.
inline double min_symmetric_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace lqgap
