#pragma once

#include <Eigen/Dense>
#include <memory>

namespace unlearn {

/// Regression problem: dense features (rows are points), responses, optional
/// strictly positive per-point weights and a ridge strength that is fixed
/// independent of the number of samples.
struct Dataset {
  Eigen::MatrixXd features;   // n x d
  Eigen::VectorXd responses;  // n
  Eigen::VectorXd weights;    // n when present, size 0 means unit weights
  double ridge_lambda = 0.0;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index d() const { return features.cols(); }
  bool has_weights() const { return weights.size() > 0; }
  Eigen::VectorXd effective_weights() const {
    return has_weights() ? weights : Eigen::VectorXd::Ones(n());
  }
};

void validate(const Dataset& data);

struct PrecomputeOptions {
  // Dense n x n hat storage is refused beyond this row budget.
  Eigen::Index max_hat_rows = 30000;
};

/// Offline artifacts shared by every deletion method: fitted parameters, the
/// hat matrix, the inverse normal matrix and per-point residuals. Immutable
/// once built; safe for concurrent reads.
struct PrecomputedModel {
  std::shared_ptr<const Dataset> data;
  Eigen::VectorXd theta_full;
  Eigen::MatrixXd hat;          // n x n, H = X (X^T W X + lambda I)^{-1} X^T W
  Eigen::MatrixXd inv_hessian;  // d x d
  Eigen::VectorXd residuals;    // y - X theta_full
};

/// Exact minimizer of 0.5 [sum_i w_i (theta.x_i - y_i)^2 + lambda |theta|^2],
/// solved with a Cholesky factorization of the normal matrix.
Eigen::VectorXd fit_ridge(const Dataset& data);

Eigen::MatrixXd hat_matrix(const Dataset& data);

PrecomputedModel precompute(std::shared_ptr<const Dataset> data,
                            const PrecomputeOptions& opts = {});
PrecomputedModel precompute(const Dataset& data,
                            const PrecomputeOptions& opts = {});

}  // namespace unlearn
