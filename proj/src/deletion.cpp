#include "unlearn/deletion.hpp"

#include <Eigen/LU>
#include <chrono>
#include <stdexcept>
#include <string>

#include "unlearn/errors.hpp"
#include "unlearn/lowrank.hpp"

namespace unlearn {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct DeletedRows {
  Eigen::MatrixXd features;   // k x d
  Eigen::VectorXd weights;    // k
  Eigen::VectorXd residuals;  // k
};

DeletedRows gather_deleted(const PrecomputedModel& model,
                           const DeletionRequest& req) {
  const Eigen::Index k = req.k();
  DeletedRows rows;
  rows.features.resize(k, model.data->d());
  rows.weights.resize(k);
  rows.residuals.resize(k);
  const bool weighted = model.data->has_weights();
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index idx = req.indices[static_cast<std::size_t>(i)];
    rows.features.row(i) = model.data->features.row(idx);
    rows.weights(i) = weighted ? model.data->weights(idx) : 1.0;
    rows.residuals(i) = model.residuals(idx);
  }
  return rows;
}

// Gradient of the full loss contributed by the deleted points at theta_full:
// sum_i w_i (theta.x_i - y_i) x_i = -X_del^T (w .* r_del).
Eigen::VectorXd deleted_gradient(const DeletedRows& rows) {
  return -(rows.features.transpose() *
           rows.weights.cwiseProduct(rows.residuals));
}

void check_finite(const Eigen::VectorXd& theta, const char* what) {
  if (!theta.allFinite())
    throw RankDeficiencyError(std::string(what) +
                              ": update produced non-finite parameters");
}

}  // namespace

const char* method_name(DeletionMethod method) {
  switch (method) {
    case DeletionMethod::kExact: return "exact";
    case DeletionMethod::kNewton: return "newton";
    case DeletionMethod::kInfluence: return "influence";
    case DeletionMethod::kPru: return "pru";
  }
  return "unknown";
}

DeletionResult exact_delete(const PrecomputedModel& model,
                            const DeletionRequest& req) {
  const auto start = Clock::now();
  validate(req, model.data->n());
  const DeletedRows rows = gather_deleted(model, req);
  const Eigen::VectorXd grad = deleted_gradient(rows);

  // (M - X_del^T W_del X_del)^{-1} g
  //   = M^{-1} g + M^{-1} X_del^T K^{-1} X_del M^{-1} g,
  // with capacitance K = W_del^{-1} - X_del M^{-1} X_del^T.
  const Eigen::MatrixXd inv_xt =
      model.inv_hessian.selfadjointView<Eigen::Lower>() *
      rows.features.transpose();  // d x k
  Eigen::MatrixXd capacitance = -rows.features * inv_xt;
  capacitance.diagonal() += rows.weights.cwiseInverse();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(capacitance);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.maxCoeff() == 0.0 ||
      pivots.minCoeff() <= 1e-12 * pivots.maxCoeff())
    throw RankDeficiencyError(
        "exact_delete: downdated normal matrix is singular; the deletion "
        "destroys identifiability at ridge_lambda = 0");

  const Eigen::VectorXd inv_grad =
      model.inv_hessian.selfadjointView<Eigen::Lower>() * grad;
  const Eigen::VectorXd correction = lu.solve(rows.features * inv_grad);
  const Eigen::VectorXd theta =
      model.theta_full + inv_grad + inv_xt * correction;
  check_finite(theta, "exact_delete");
  return {theta, DeletionMethod::kExact, seconds_since(start)};
}

DeletionResult influence_delete(const PrecomputedModel& model,
                                const DeletionRequest& req) {
  const auto start = Clock::now();
  validate(req, model.data->n());
  const DeletedRows rows = gather_deleted(model, req);
  const Eigen::VectorXd grad = deleted_gradient(rows);
  const Eigen::VectorXd theta =
      model.theta_full +
      model.inv_hessian.selfadjointView<Eigen::Lower>() * grad;
  check_finite(theta, "influence_delete");
  return {theta, DeletionMethod::kInfluence, seconds_since(start)};
}

DeletionResult pru_delete(const PrecomputedModel& model,
                          const DeletionRequest& req) {
  const auto start = Clock::now();
  validate(req, model.data->n());
  const Eigen::VectorXd predictions = lko_predictions(model, req);

  const Eigen::Index k = req.k();
  Eigen::MatrixXd deleted(k, model.data->d());
  for (Eigen::Index i = 0; i < k; ++i)
    deleted.row(i) =
        model.data->features.row(req.indices[static_cast<std::size_t>(i)]);

  // Gradient of the quadratic loss on the synthetic points (x_i, yhat_i).
  const Eigen::VectorXd margins = deleted * model.theta_full - predictions;
  const Eigen::VectorXd grad = deleted.transpose() * margins;

  const LowRankPinv pinv = pseudo_inverse(deleted);
  const Eigen::VectorXd theta =
      model.theta_full - apply_pseudoinverse(pinv, grad);
  check_finite(theta, "pru_delete");
  return {theta, DeletionMethod::kPru, seconds_since(start)};
}

DeletionResult delete_points(const PrecomputedModel& model,
                             const DeletionRequest& req,
                             DeletionMethod method) {
  switch (method) {
    case DeletionMethod::kExact: return exact_delete(model, req);
    case DeletionMethod::kInfluence: return influence_delete(model, req);
    case DeletionMethod::kPru: return pru_delete(model, req);
    case DeletionMethod::kNewton: break;
  }
  throw std::invalid_argument("delete_points: unsupported method for linear models");
}

}  // namespace unlearn
