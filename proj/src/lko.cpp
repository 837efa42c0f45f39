#include "unlearn/lko.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "unlearn/errors.hpp"

namespace unlearn {

namespace {

constexpr double kDiagonalTol = 1e-12;  // |1 - h_ii| at or below this is degenerate
constexpr double kPivotTol = 1e-12;     // relative pivot threshold for singularity

}  // namespace

void validate(const DeletionRequest& req, Eigen::Index n) {
  const Eigen::Index k = req.k();
  if (k < 1 || k > n - 1)
    throw std::invalid_argument(
        "DeletionRequest: need 1 <= k <= n - 1 deleted points");
  std::vector<Eigen::Index> sorted = req.indices;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0 || sorted.back() >= n)
    throw std::invalid_argument("DeletionRequest: index out of range");
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("DeletionRequest: indices must be distinct");
}

Eigen::VectorXd lko_residuals(const Eigen::MatrixXd& hat,
                              const Eigen::VectorXd& residuals,
                              const std::vector<Eigen::Index>& indices) {
  const Eigen::Index k = static_cast<Eigen::Index>(indices.size());
  if (hat.rows() != hat.cols() || residuals.size() != hat.rows())
    throw std::invalid_argument("lko_residuals: hat and residuals disagree");
  if (k < 1) throw std::invalid_argument("lko_residuals: empty index set");
  for (Eigen::Index idx : indices)
    if (idx < 0 || idx >= hat.rows())
      throw std::invalid_argument("lko_residuals: index out of range");

  // Canonical ascending order, so permuting the request permutes the output
  // with no other change.
  std::vector<Eigen::Index> order(indices.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&indices](Eigen::Index a, Eigen::Index b) {
              return indices[static_cast<std::size_t>(a)] <
                     indices[static_cast<std::size_t>(b)];
            });

  Eigen::MatrixXd system(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index a = 0; a < k; ++a) {
    const Eigen::Index i = indices[static_cast<std::size_t>(order[a])];
    const double denom = 1.0 - hat(i, i);
    if (std::abs(denom) <= kDiagonalTol)
      throw DegeneracyError(
          "lko_residuals: hat diagonal entry is 1, the point carries "
          "essential support and the leave-k-out problem is ill-posed");
    rhs(a) = residuals(i) / denom;
    for (Eigen::Index b = 0; b < k; ++b) {
      const Eigen::Index j = indices[static_cast<std::size_t>(order[b])];
      system(a, b) = (a == b) ? 1.0 : -hat(i, j) / denom;
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  if (pivots.minCoeff() <= kPivotTol * pivots.maxCoeff())
    throw DegeneracyError("lko_residuals: leave-k-out system is singular");

  const Eigen::VectorXd solved = lu.solve(rhs);
  if (!solved.allFinite())
    throw DegeneracyError("lko_residuals: solve produced non-finite values");

  Eigen::VectorXd out(k);
  for (Eigen::Index a = 0; a < k; ++a) out(order[a]) = solved(a);
  return out;
}

Eigen::VectorXd lko_predictions(const PrecomputedModel& model,
                                const DeletionRequest& req) {
  validate(req, model.data->n());
  const Eigen::VectorXd r_lko =
      lko_residuals(model.hat, model.residuals, req.indices);
  Eigen::VectorXd out(req.k());
  for (Eigen::Index i = 0; i < req.k(); ++i)
    out(i) = model.data->responses(req.indices[static_cast<std::size_t>(i)]) -
             r_lko(i);
  return out;
}

}  // namespace unlearn
