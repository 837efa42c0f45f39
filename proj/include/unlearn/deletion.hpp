#pragma once

#include <Eigen/Dense>

#include "unlearn/linear.hpp"
#include "unlearn/lko.hpp"

namespace unlearn {

enum class DeletionMethod { kExact, kNewton, kInfluence, kPru };

const char* method_name(DeletionMethod method);

/// Updated parameters plus the wall-clock cost of the online phase only
/// (precomputation is excluded).
struct DeletionResult {
  Eigen::VectorXd theta;
  DeletionMethod method;
  double online_seconds = 0.0;
};

/// Exact deletion: rank-k downdate of the inverse normal matrix through a
/// k-dimensional capacitance solve, followed by the Newton step (exact for
/// quadratic loss). O(k d^2) online; touches no retained data rows.
DeletionResult exact_delete(const PrecomputedModel& model,
                            const DeletionRequest& req);

/// Influence-function update: theta_full + inv_hessian times the deleted
/// points' gradient contribution. O(d^2) online.
DeletionResult influence_delete(const PrecomputedModel& model,
                                const DeletionRequest& req);

/// Projective residual update: leave-k-out predictions, synthetic-point
/// gradient, then a pseudoinverse step restricted to the span of the deleted
/// feature vectors. O(k^2 d) online; no d x d product is formed.
DeletionResult pru_delete(const PrecomputedModel& model,
                          const DeletionRequest& req);

/// Strategy dispatch so the harness times every method under identical call
/// overhead.
DeletionResult delete_points(const PrecomputedModel& model,
                             const DeletionRequest& req,
                             DeletionMethod method);

}  // namespace unlearn
