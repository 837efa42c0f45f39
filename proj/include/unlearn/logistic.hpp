#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "unlearn/deletion.hpp"
#include "unlearn/linear.hpp"
#include "unlearn/lko.hpp"

namespace unlearn {

struct LogisticFitOptions {
  double gradient_tol_scale = 1e-10;  // converged when |grad| <= scale*(1+n)
  int max_iterations = 100;
};

struct LogisticFitDiagnostics {
  int iterations = 0;
  double gradient_norm = 0.0;
  std::vector<double> loss_trace;  // loss at the start and after each step
};

/// Minimizes the ridge-regularized cross-entropy loss with damped Newton
/// iterations (Armijo backtracking). Labels must be exactly 0 or 1. Throws
/// ConvergenceError when the iteration budget is exhausted.
Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& features,
                             const Eigen::VectorXd& labels,
                             double ridge_lambda,
                             const LogisticFitOptions& opts = {},
                             LogisticFitDiagnostics* diagnostics = nullptr);

/// Offline artifacts for logistic deletion. The model linearizes the fit at
/// theta_full into one weighted least-squares problem: weights h(1-h),
/// working targets Z = X theta + S^{-1}(Y - h), and the weighted hat matrix
/// of that problem. wls_residuals are taken against the exact solution of
/// the full weighted problem so the leave-k-out identity stays exact even
/// when theta_full carries leftover trainer tolerance.
struct LogisticModel {
  std::shared_ptr<const Dataset> data;  // features + 0/1 labels + ridge
  Eigen::VectorXd theta_full;
  Eigen::VectorXd predictions;     // h, clamped away from {0, 1}
  Eigen::VectorXd irls_weights;    // h (1 - h)
  Eigen::VectorXd z_targets;       // X theta + (y - h) / w
  Eigen::MatrixXd weighted_hat;    // n x n, X (X^T S X + lambda I)^{-1} X^T S
  Eigen::MatrixXd inv_hessian;     // (X^T S X + lambda I)^{-1}
  Eigen::VectorXd wls_residuals;   // z - X theta_wls
  Eigen::VectorXd full_gradient;   // ridge cross-entropy gradient at theta_full
  double ridge_lambda = 0.0;
};

LogisticModel logistic_precompute(const Eigen::MatrixXd& features,
                                  const Eigen::VectorXd& labels,
                                  const Eigen::VectorXd& theta_full,
                                  double ridge_lambda,
                                  const PrecomputeOptions& opts = {});

/// One exact Newton step on the leave-k-out cross-entropy loss from
/// theta_full; equals the leave-k-out weighted least-squares solution.
DeletionResult logistic_newton_delete(const LogisticModel& model,
                                      const DeletionRequest& req);

/// Influence-function update with the full-data Hessian.
DeletionResult logistic_influence_delete(const LogisticModel& model,
                                         const DeletionRequest& req);

/// Projective residual update on the linearized problem: weighted leave-k-out
/// predictions of the working targets, synthetic gradient, pseudoinverse step.
DeletionResult logistic_pru_delete(const LogisticModel& model,
                                   const DeletionRequest& req);

DeletionResult logistic_delete_points(const LogisticModel& model,
                                      const DeletionRequest& req,
                                      DeletionMethod method);

}  // namespace unlearn
