#include "unlearn/linear.hpp"

#include <Eigen/Cholesky>
#include <stdexcept>
#include <string>

#include "unlearn/errors.hpp"

namespace unlearn {

namespace {

struct NormalSystem {
  Eigen::LLT<Eigen::MatrixXd> llt;  // of X^T W X + lambda I
  Eigen::VectorXd rhs;              // X^T W y
};

NormalSystem factor_normal_system(const Dataset& data) {
  const Eigen::Index d = data.d();
  const Eigen::VectorXd w = data.effective_weights();
  const Eigen::MatrixXd xw = data.features.transpose() *
                             w.cwiseSqrt().asDiagonal();  // d x n

  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(d, d);
  normal.selfadjointView<Eigen::Lower>().rankUpdate(xw);
  normal.diagonal().array() += data.ridge_lambda;

  NormalSystem sys;
  sys.llt.compute(normal.selfadjointView<Eigen::Lower>());
  if (sys.llt.info() != Eigen::Success)
    throw RankDeficiencyError(
        "fit_ridge: normal matrix is singular; features are rank deficient "
        "and ridge_lambda is zero");
  sys.rhs = data.features.transpose() * w.cwiseProduct(data.responses);
  return sys;
}

Eigen::MatrixXd hat_from_factor(const Dataset& data,
                                const Eigen::LLT<Eigen::MatrixXd>& llt) {
  // H = X M^{-1} X^T W = G G^T diag(w) with G = X L^{-T}.
  Eigen::MatrixXd gt =
      llt.matrixL().solve(data.features.transpose());  // d x n
  const Eigen::Index n = data.n();
  Eigen::MatrixXd hat = Eigen::MatrixXd::Zero(n, n);
  hat.selfadjointView<Eigen::Lower>().rankUpdate(gt.transpose());
  hat.triangularView<Eigen::Upper>() =
      hat.triangularView<Eigen::Lower>().transpose();
  if (data.has_weights())
    hat = hat * data.weights.asDiagonal();
  return hat;
}

}  // namespace

void validate(const Dataset& data) {
  if (data.n() < 1 || data.d() < 1)
    throw std::invalid_argument("Dataset: need n >= 1 and d >= 1");
  if (data.responses.size() != data.n())
    throw std::invalid_argument("Dataset: responses size does not match n");
  if (!data.features.allFinite() || !data.responses.allFinite())
    throw std::invalid_argument("Dataset: non-finite entries");
  if (data.has_weights()) {
    if (data.weights.size() != data.n())
      throw std::invalid_argument("Dataset: weights size does not match n");
    if (!data.weights.allFinite() || data.weights.minCoeff() <= 0.0)
      throw std::invalid_argument("Dataset: weights must be strictly positive");
  }
  if (!(data.ridge_lambda >= 0.0))
    throw std::invalid_argument("Dataset: ridge_lambda must be nonnegative");
}

Eigen::VectorXd fit_ridge(const Dataset& data) {
  validate(data);
  NormalSystem sys = factor_normal_system(data);
  Eigen::VectorXd theta = sys.llt.solve(sys.rhs);
  if (!theta.allFinite())
    throw RankDeficiencyError("fit_ridge: solve produced non-finite values");
  return theta;
}

Eigen::MatrixXd hat_matrix(const Dataset& data) {
  validate(data);
  NormalSystem sys = factor_normal_system(data);
  return hat_from_factor(data, sys.llt);
}

PrecomputedModel precompute(std::shared_ptr<const Dataset> data,
                            const PrecomputeOptions& opts) {
  validate(*data);
  if (data->n() > opts.max_hat_rows)
    throw std::invalid_argument(
        "precompute: n = " + std::to_string(data->n()) +
        " exceeds the dense hat matrix budget of " +
        std::to_string(opts.max_hat_rows) + " rows");

  NormalSystem sys = factor_normal_system(*data);

  PrecomputedModel model;
  model.data = std::move(data);
  model.theta_full = sys.llt.solve(sys.rhs);
  if (!model.theta_full.allFinite())
    throw RankDeficiencyError("precompute: solve produced non-finite values");
  model.residuals =
      model.data->responses - model.data->features * model.theta_full;
  model.hat = hat_from_factor(*model.data, sys.llt);
  model.inv_hessian = sys.llt.solve(
      Eigen::MatrixXd::Identity(model.data->d(), model.data->d()));
  return model;
}

PrecomputedModel precompute(const Dataset& data, const PrecomputeOptions& opts) {
  return precompute(std::make_shared<const Dataset>(data), opts);
}

}  // namespace unlearn
