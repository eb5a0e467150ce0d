#pragma once

#include <vector>

#include <Eigen/Dense>

namespace scalemix {

bool is_positive_definite(const Eigen::MatrixXd& m);

// Both throw Error(NotPositiveDefinite) when the Cholesky factorization fails.
double log_det_spd(const Eigen::MatrixXd& m);
Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& m);

bool is_symmetric(const Eigen::MatrixXd& m, double tol = 0.0);

inline Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& m, const std::vector<int>& idx) {
  return m(idx, idx);
}

}  // namespace scalemix
