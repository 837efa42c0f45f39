#pragma once

#include <Eigen/Dense>
#include <vector>

#include "unlearn/linear.hpp"

namespace unlearn {

/// Batch deletion request: distinct point indices in [0, n).
struct DeletionRequest {
  std::vector<Eigen::Index> indices;

  Eigen::Index k() const { return static_cast<Eigen::Index>(indices.size()); }
};

/// Throws std::invalid_argument unless indices are distinct, in range and
/// 1 <= k <= n - 1.
void validate(const DeletionRequest& req, Eigen::Index n);

/// Leave-k-out residuals r_i - y_i + x_i . theta_lko for the requested
/// indices, from the hat matrix and full-fit residuals alone. Solves the
/// k-by-k system r_lko[i] = (r_i + sum_{j != i} h_ij r_lko[j]) / (1 - h_ii)
/// by Gaussian elimination with partial pivoting. Indices are processed in
/// canonical ascending order so the result is exactly permutation
/// equivariant. Throws DegeneracyError when some h_ii is 1 (within 1e-12) or
/// the system is singular.
Eigen::VectorXd lko_residuals(const Eigen::MatrixXd& hat,
                              const Eigen::VectorXd& residuals,
                              const std::vector<Eigen::Index>& indices);

/// Predictions of the exactly refit leave-k-out model at the deleted points,
/// in O(k^3) given the precomputed hat matrix.
Eigen::VectorXd lko_predictions(const PrecomputedModel& model,
                                const DeletionRequest& req);

}  // namespace unlearn
