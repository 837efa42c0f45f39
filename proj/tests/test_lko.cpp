#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>

#include "oracles.hpp"
#include "unlearn/errors.hpp"
#include "unlearn/lko.hpp"
#include "unlearn/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using unlearn::Dataset;
using unlearn::DeletionRequest;
using unlearn::SplitMix64;

TEST_CASE("leave-one-out matches the closed-form residual identity exactly") {
  SplitMix64 rng(201);
  const Dataset data = oracle::random_dataset(rng, 12, 3, 0.2, false);
  const auto model = unlearn::precompute(data);
  for (Eigen::Index i : {0, 5, 11}) {
    const DeletionRequest req{{i}};
    const VectorXd pred = unlearn::lko_predictions(model, req);
    const double closed_form =
        data.responses(i) - model.residuals(i) / (1.0 - model.hat(i, i));
    CHECK(pred(0) == closed_form);
  }
}

TEST_CASE("deleting a zero feature row predicts exactly zero") {
  SplitMix64 rng(202);
  Dataset data = oracle::random_dataset(rng, 10, 3, 0.0, false);
  data.features.row(0).setZero();
  const auto model = unlearn::precompute(data);
  const VectorXd pred = unlearn::lko_predictions(model, DeletionRequest{{0}});
  CHECK(pred(0) == 0.0);
}

TEST_CASE("lko predictions equal refit predictions") {
  SplitMix64 rng(203);
  const Dataset data = oracle::random_dataset(rng, 20, 5, 0.1, false);
  const auto model = unlearn::precompute(data);
  const std::vector<Eigen::Index> deleted{2, 7, 14};
  const VectorXd pred =
      unlearn::lko_predictions(model, DeletionRequest{deleted});
  const VectorXd theta_lko = oracle::refit_without(data, deleted);
  for (std::size_t i = 0; i < deleted.size(); ++i) {
    const double expected =
        data.features.row(deleted[i]).dot(theta_lko.transpose());
    CHECK(pred(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("lko predictions handle weights and regularization together") {
  SplitMix64 rng(204);
  const Dataset data = oracle::random_dataset(rng, 25, 4, 0.3, true);
  const auto model = unlearn::precompute(data);
  const std::vector<Eigen::Index> deleted{0, 9, 17, 21};
  const VectorXd pred =
      unlearn::lko_predictions(model, DeletionRequest{deleted});
  const VectorXd theta_lko = oracle::refit_without(data, deleted);
  for (std::size_t i = 0; i < deleted.size(); ++i) {
    const double expected =
        data.features.row(deleted[i]).dot(theta_lko.transpose());
    CHECK(pred(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("permuting the request permutes the output identically") {
  SplitMix64 rng(205);
  const Dataset data = oracle::random_dataset(rng, 18, 4, 0.2, false);
  const auto model = unlearn::precompute(data);
  const std::vector<Eigen::Index> forward{3, 8, 12, 16};
  const std::vector<Eigen::Index> shuffled{12, 3, 16, 8};
  const VectorXd a =
      unlearn::lko_predictions(model, DeletionRequest{forward});
  const VectorXd b =
      unlearn::lko_predictions(model, DeletionRequest{shuffled});
  CHECK(a(0) == b(1));
  CHECK(a(1) == b(3));
  CHECK(a(2) == b(0));
  CHECK(a(3) == b(2));
}

TEST_CASE("hat diagonal at one is reported as degenerate") {
  SplitMix64 rng(206);
  Dataset data;
  data.features = oracle::random_matrix(rng, 3, 3);  // interpolating design
  data.responses = oracle::random_vector(rng, 3);
  const auto model = unlearn::precompute(data);
  CHECK_THROWS_AS(unlearn::lko_predictions(model, DeletionRequest{{0}}),
                  unlearn::DegeneracyError);
}

TEST_CASE("a singular leave-k-out system is reported as degenerate") {
  MatrixXd hat(2, 2);
  hat << 0.5, 0.5, 0.5, 0.5;
  const VectorXd residuals = VectorXd::Ones(2);
  CHECK_THROWS_AS(unlearn::lko_residuals(hat, residuals, {0, 1}),
                  unlearn::DegeneracyError);
}

TEST_CASE("request validation") {
  CHECK_THROWS_AS(unlearn::validate(DeletionRequest{{}}, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(unlearn::validate(DeletionRequest{{0, 0}}, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(unlearn::validate(DeletionRequest{{5}}, 5),
                  std::invalid_argument);
  CHECK_THROWS_AS(unlearn::validate(DeletionRequest{{0, 1, 2, 3, 4}}, 5),
                  std::invalid_argument);
  CHECK_NOTHROW(unlearn::validate(DeletionRequest{{0, 4}}, 5));
}
