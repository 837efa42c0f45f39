#include "unlearn/logistic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "unlearn/errors.hpp"
#include "unlearn/lowrank.hpp"

namespace unlearn {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kProbClamp = 1e-12;
constexpr double kArmijoSlope = 1e-4;
constexpr int kMaxBacktracks = 60;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// Ridge-regularized negative log-likelihood.
double logistic_loss(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                     const Eigen::VectorXd& theta, double ridge_lambda) {
  const Eigen::VectorXd z = x * theta;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    loss += softplus(z(i)) - y(i) * z(i);
  return loss + 0.5 * ridge_lambda * theta.squaredNorm();
}

void validate_labels(const Eigen::VectorXd& labels) {
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels(i) != 0.0 && labels(i) != 1.0)
      throw std::invalid_argument("logistic: labels must be exactly 0 or 1");
}

struct DeletedRows {
  Eigen::MatrixXd features;    // k x d
  Eigen::VectorXd irls_weights;
  Eigen::VectorXd grad;        // sum_del (h_i - y_i) x_i
};

DeletedRows gather_deleted(const LogisticModel& model,
                           const DeletionRequest& req) {
  const Eigen::Index k = req.k();
  DeletedRows rows;
  rows.features.resize(k, model.data->d());
  rows.irls_weights.resize(k);
  Eigen::VectorXd errs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index idx = req.indices[static_cast<std::size_t>(i)];
    rows.features.row(i) = model.data->features.row(idx);
    rows.irls_weights(i) = model.irls_weights(idx);
    errs(i) = model.predictions(idx) - model.data->responses(idx);
  }
  rows.grad = rows.features.transpose() * errs;
  return rows;
}

void check_finite(const Eigen::VectorXd& theta, const char* what) {
  if (!theta.allFinite())
    throw RankDeficiencyError(std::string(what) +
                              ": update produced non-finite parameters");
}

}  // namespace

Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& features,
                             const Eigen::VectorXd& labels,
                             double ridge_lambda,
                             const LogisticFitOptions& opts,
                             LogisticFitDiagnostics* diagnostics) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n < 1 || d < 1 || labels.size() != n)
    throw std::invalid_argument("fit_logistic: inconsistent shapes");
  validate_labels(labels);
  if (!(ridge_lambda >= 0.0))
    throw std::invalid_argument("fit_logistic: ridge_lambda must be >= 0");

  const double tol = opts.gradient_tol_scale * (1.0 + static_cast<double>(n));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  double loss = logistic_loss(features, labels, theta, ridge_lambda);
  if (diagnostics) {
    diagnostics->loss_trace.clear();
    diagnostics->loss_trace.push_back(loss);
  }

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Eigen::VectorXd z = features * theta;
    const Eigen::VectorXd h = z.unaryExpr([](double v) { return sigmoid(v); });
    const Eigen::VectorXd grad =
        features.transpose() * (h - labels) + ridge_lambda * theta;
    const double grad_norm = grad.norm();
    if (diagnostics) {
      diagnostics->iterations = iter;
      diagnostics->gradient_norm = grad_norm;
    }
    if (grad_norm <= tol) return theta;

    const Eigen::VectorXd s = h.array() * (1.0 - h.array());
    const Eigen::MatrixXd sx = s.cwiseSqrt().asDiagonal() * features;
    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(d, d);
    hessian.selfadjointView<Eigen::Lower>().rankUpdate(sx.transpose());
    hessian.diagonal().array() += ridge_lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(hessian.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success)
      throw ConvergenceError("fit_logistic: Hessian is not positive definite");

    const Eigen::VectorXd direction = -llt.solve(grad);
    const double slope = grad.dot(direction);

    // Round-off allowance: near the optimum the Newton decrement drops below
    // the resolution of the loss value, so insisting on a measured decrease
    // would stall the iteration at a zero-length step.
    const double loss_resolution =
        4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(loss));

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      const Eigen::VectorXd candidate = theta + step * direction;
      const double candidate_loss =
          logistic_loss(features, labels, candidate, ridge_lambda);
      if (candidate_loss <=
          loss + kArmijoSlope * step * slope + loss_resolution) {
        theta = candidate;
        loss = candidate_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      throw ConvergenceError("fit_logistic: line search failed to make progress");
    if (diagnostics) diagnostics->loss_trace.push_back(loss);
  }

  const Eigen::VectorXd z = features * theta;
  const Eigen::VectorXd h = z.unaryExpr([](double v) { return sigmoid(v); });
  const double final_norm =
      (features.transpose() * (h - labels) + ridge_lambda * theta).norm();
  char norm_text[32];
  std::snprintf(norm_text, sizeof(norm_text), "%.3e", final_norm);
  throw ConvergenceError("fit_logistic: no convergence within " +
                         std::to_string(opts.max_iterations) +
                         " iterations; gradient norm = " + norm_text);
}

LogisticModel logistic_precompute(const Eigen::MatrixXd& features,
                                  const Eigen::VectorXd& labels,
                                  const Eigen::VectorXd& theta_full,
                                  double ridge_lambda,
                                  const PrecomputeOptions& opts) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n < 1 || d < 1 || labels.size() != n || theta_full.size() != d)
    throw std::invalid_argument("logistic_precompute: inconsistent shapes");
  validate_labels(labels);
  if (n > opts.max_hat_rows)
    throw std::invalid_argument(
        "logistic_precompute: n exceeds the dense hat matrix budget");

  LogisticModel model;
  model.ridge_lambda = ridge_lambda;
  model.theta_full = theta_full;

  const Eigen::VectorXd z = features * theta_full;
  // Clamp h away from {0, 1} before inverting S or forming Z.
  model.predictions = z.unaryExpr([](double v) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, sigmoid(v)));
  });
  model.irls_weights =
      model.predictions.array() * (1.0 - model.predictions.array());
  model.z_targets =
      z + ((labels - model.predictions).cwiseQuotient(model.irls_weights));
  model.full_gradient = features.transpose() * (model.predictions - labels) +
                        ridge_lambda * theta_full;

  const Eigen::MatrixXd sx =
      model.irls_weights.cwiseSqrt().asDiagonal() * features;
  Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(d, d);
  hessian.selfadjointView<Eigen::Lower>().rankUpdate(sx.transpose());
  hessian.diagonal().array() += ridge_lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(hessian.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success)
    throw RankDeficiencyError(
        "logistic_precompute: weighted normal matrix is singular");

  model.inv_hessian = llt.solve(Eigen::MatrixXd::Identity(d, d));

  Eigen::MatrixXd gt = llt.matrixL().solve(features.transpose());  // d x n
  model.weighted_hat = Eigen::MatrixXd::Zero(n, n);
  model.weighted_hat.selfadjointView<Eigen::Lower>().rankUpdate(gt.transpose());
  model.weighted_hat.triangularView<Eigen::Upper>() =
      model.weighted_hat.triangularView<Eigen::Lower>().transpose();
  model.weighted_hat = model.weighted_hat * model.irls_weights.asDiagonal();

  // Residuals against the exact solution of the full weighted problem.
  const Eigen::VectorXd theta_wls = llt.solve(
      features.transpose() * model.irls_weights.cwiseProduct(model.z_targets));
  model.wls_residuals = model.z_targets - features * theta_wls;

  auto data = std::make_shared<Dataset>();
  data->features = features;
  data->responses = labels;
  data->ridge_lambda = ridge_lambda;
  model.data = std::move(data);
  return model;
}

DeletionResult logistic_newton_delete(const LogisticModel& model,
                                      const DeletionRequest& req) {
  const auto start = Clock::now();
  validate(req, model.data->n());
  const DeletedRows rows = gather_deleted(model, req);
  const Eigen::VectorXd lko_grad = model.full_gradient - rows.grad;

  // Downdated Hessian inverse via the capacitance solve, as in exact_delete.
  const Eigen::MatrixXd inv_xt =
      model.inv_hessian.selfadjointView<Eigen::Lower>() *
      rows.features.transpose();  // d x k
  Eigen::MatrixXd capacitance = -rows.features * inv_xt;
  capacitance.diagonal() += rows.irls_weights.cwiseInverse();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(capacitance);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.maxCoeff() == 0.0 ||
      pivots.minCoeff() <= 1e-12 * pivots.maxCoeff())
    throw RankDeficiencyError(
        "logistic_newton_delete: downdated Hessian is singular");

  const Eigen::VectorXd inv_grad =
      model.inv_hessian.selfadjointView<Eigen::Lower>() * lko_grad;
  const Eigen::VectorXd correction = lu.solve(rows.features * inv_grad);
  const Eigen::VectorXd theta =
      model.theta_full - (inv_grad + inv_xt * correction);
  check_finite(theta, "logistic_newton_delete");
  return {theta, DeletionMethod::kNewton, seconds_since(start)};
}

DeletionResult logistic_influence_delete(const LogisticModel& model,
                                         const DeletionRequest& req) {
  const auto start = Clock::now();
  validate(req, model.data->n());
  const DeletedRows rows = gather_deleted(model, req);
  const Eigen::VectorXd lko_grad = model.full_gradient - rows.grad;
  const Eigen::VectorXd theta =
      model.theta_full -
      model.inv_hessian.selfadjointView<Eigen::Lower>() * lko_grad;
  check_finite(theta, "logistic_influence_delete");
  return {theta, DeletionMethod::kInfluence, seconds_since(start)};
}

DeletionResult logistic_pru_delete(const LogisticModel& model,
                                   const DeletionRequest& req) {
  const auto start = Clock::now();
  validate(req, model.data->n());

  const Eigen::VectorXd r_lko =
      lko_residuals(model.weighted_hat, model.wls_residuals, req.indices);

  const Eigen::Index k = req.k();
  Eigen::MatrixXd deleted(k, model.data->d());
  Eigen::VectorXd z_hat(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index idx = req.indices[static_cast<std::size_t>(i)];
    deleted.row(i) = model.data->features.row(idx);
    z_hat(i) = model.z_targets(idx) - r_lko(i);
  }

  // Unweighted quadratic loss on the synthetic points (x_i, z_hat_i).
  const Eigen::VectorXd margins = deleted * model.theta_full - z_hat;
  const Eigen::VectorXd grad = deleted.transpose() * margins;

  const LowRankPinv pinv = pseudo_inverse(deleted);
  const Eigen::VectorXd theta =
      model.theta_full - apply_pseudoinverse(pinv, grad);
  check_finite(theta, "logistic_pru_delete");
  return {theta, DeletionMethod::kPru, seconds_since(start)};
}

DeletionResult logistic_delete_points(const LogisticModel& model,
                                      const DeletionRequest& req,
                                      DeletionMethod method) {
  switch (method) {
    case DeletionMethod::kNewton: return logistic_newton_delete(model, req);
    case DeletionMethod::kInfluence:
      return logistic_influence_delete(model, req);
    case DeletionMethod::kPru: return logistic_pru_delete(model, req);
    case DeletionMethod::kExact: break;
  }
  throw std::invalid_argument(
      "logistic_delete_points: unsupported method for logistic models");
}

}  // namespace unlearn
