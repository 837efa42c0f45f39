#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "oracles.hpp"
#include "unlearn/datagen.hpp"
#include "unlearn/logistic.hpp"
#include "unlearn/lowrank.hpp"
#include "unlearn/rng.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using unlearn::GenConfig;
using unlearn::SplitMix64;

TEST_CASE("spd covariance is exactly symmetric with bounded spectrum") {
  CHECK(unlearn::gen_spd_covariance(1, 7)(0, 0) > 0.0);

  const MatrixXd cov = unlearn::gen_spd_covariance(10, 7);
  CHECK((cov - cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const auto eig = unlearn::eigendecompose_small(cov);
  CHECK(eig.values.minCoeff() >= 0.05 - 1e-9);
  CHECK(eig.values.maxCoeff() <= 2.0 + 1e-9);
}

TEST_CASE("gen_linear is noiseless when sigma2 is zero") {
  GenConfig cfg;
  cfg.d = 4;
  cfg.n = 30;
  cfg.k = 3;
  cfg.noise_sigma2 = 0.0;
  cfg.seed = 11;
  const auto out = unlearn::gen_linear(cfg);
  const VectorXd expected = out.dataset.features * out.theta_star;
  CHECK((out.dataset.responses - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("generators are bitwise deterministic under a fixed seed") {
  GenConfig cfg;
  cfg.d = 6;
  cfg.k = 2;
  cfg.sparsity_p = 0.4;
  cfg.seed = 99;
  const auto a = unlearn::gen_fit_linear(cfg);
  const auto b = unlearn::gen_fit_linear(cfg);
  CHECK((a.dataset.features.array() == b.dataset.features.array()).all());
  CHECK((a.dataset.responses.array() == b.dataset.responses.array()).all());
  CHECK((a.theta_star.array() == b.theta_star.array()).all());

  const auto la = unlearn::gen_logistic(cfg);
  const auto lb = unlearn::gen_logistic(cfg);
  CHECK((la.dataset.features.array() == lb.dataset.features.array()).all());
  CHECK((la.dataset.responses.array() == lb.dataset.responses.array()).all());
}

TEST_CASE("row sample covariance approaches the requested covariance") {
  GenConfig cfg;
  cfg.d = 5;
  cfg.n = 20000;
  cfg.seed = 13;
  const auto out = unlearn::gen_linear(cfg);
  const MatrixXd cov = unlearn::gen_spd_covariance(5, 13);
  const MatrixXd sample = out.dataset.features.transpose() *
                          out.dataset.features /
                          static_cast<double>(cfg.n);
  for (Eigen::Index i = 0; i < 5; ++i) {
    for (Eigen::Index j = 0; j < 5; ++j) {
      const double entry_var = cov(i, i) * cov(j, j) + cov(i, j) * cov(i, j);
      const double tol = 5.0 * std::sqrt(entry_var / cfg.n);
      CHECK(std::abs(sample(i, j) - cov(i, j)) <= tol);
    }
  }
}

TEST_CASE("scale_outliers multiplies exactly the first k rows") {
  GenConfig cfg;
  cfg.d = 3;
  cfg.n = 10;
  cfg.k = 2;
  cfg.seed = 17;
  const auto base = unlearn::gen_linear(cfg);
  const auto scaled = unlearn::scale_outliers(base, 2.0);
  for (Eigen::Index i = 0; i < 10; ++i) {
    const double factor = i < 2 ? 2.0 : 1.0;
    CHECK(scaled.dataset.responses(i) == factor * base.dataset.responses(i));
    for (Eigen::Index j = 0; j < 3; ++j)
      CHECK(scaled.dataset.features(i, j) ==
            factor * base.dataset.features(i, j));
  }
  const auto same = unlearn::scale_outliers(base, 1.0);
  CHECK((same.dataset.features.array() == base.dataset.features.array()).all());
}

TEST_CASE("fit dataset structure holds exactly") {
  GenConfig cfg;
  cfg.d = 12;
  cfg.n = 80;
  cfg.k = 6;
  cfg.sparsity_p = 0.3;
  cfg.w_star = 10.0;
  cfg.seed = 23;
  const auto out = unlearn::gen_fit_linear(cfg);
  REQUIRE(out.injected_index.has_value());
  const Eigen::Index inj = *out.injected_index;
  CHECK(inj == 11);

  // (1) injected column nonzero only in the first k rows
  for (Eigen::Index i = cfg.k; i < cfg.n; ++i)
    CHECK(out.dataset.features(i, inj) == 0.0);

  // (2) the first k rows share one sparsity pattern over the other columns
  for (Eigen::Index j = 0; j < inj; ++j) {
    int zeros = 0;
    for (Eigen::Index i = 0; i < cfg.k; ++i)
      if (out.dataset.features(i, j) == 0.0) ++zeros;
    CHECK((zeros == 0 || zeros == cfg.k));
  }

  // (3) deleted responses are exactly w_star times the injected entry
  for (Eigen::Index i = 0; i < cfg.k; ++i)
    CHECK(out.dataset.responses(i) ==
          cfg.w_star * out.dataset.features(i, inj));
}

TEST_CASE("full-density fit dataset only zeroes the injected column") {
  GenConfig cfg;
  cfg.d = 5;
  cfg.n = 40;
  cfg.k = 4;
  cfg.sparsity_p = 1.0;
  cfg.seed = 29;
  const auto out = unlearn::gen_fit_linear(cfg);
  Eigen::Index zero_entries = 0;
  for (Eigen::Index i = 0; i < cfg.n; ++i)
    for (Eigen::Index j = 0; j < cfg.d; ++j)
      if (out.dataset.features(i, j) == 0.0) ++zero_entries;
  CHECK(zero_entries == cfg.n - cfg.k);  // only rows > k in the last column
}

TEST_CASE("sparsity fraction matches the binomial expectation") {
  GenConfig cfg;
  cfg.d = 30;
  cfg.n = 300;
  cfg.k = 5;
  cfg.sparsity_p = 0.25;
  cfg.seed = 31;
  const auto out = unlearn::gen_fit_linear(cfg);
  Eigen::Index nonzero = 0;
  const Eigen::Index cells = (cfg.n - cfg.k) * (cfg.d - 1);
  for (Eigen::Index i = cfg.k; i < cfg.n; ++i)
    for (Eigen::Index j = 0; j + 1 < cfg.d; ++j)
      if (out.dataset.features(i, j) != 0.0) ++nonzero;
  const double expectation = cfg.sparsity_p * static_cast<double>(cells);
  const double sd = std::sqrt(static_cast<double>(cells) * cfg.sparsity_p *
                              (1.0 - cfg.sparsity_p));
  CHECK(std::abs(static_cast<double>(nonzero) - expectation) <= 4.0 * sd);
}

TEST_CASE("outlier refit direction aligns with the covariance-solved point") {
  GenConfig cfg;
  cfg.d = 20;
  cfg.n = 200;
  cfg.k = 1;
  cfg.ridge_lambda = 0.0;
  cfg.seed = 37;
  const auto base = unlearn::gen_linear(cfg);
  const auto scaled = unlearn::scale_outliers(base, 1000.0);

  const VectorXd theta_full = unlearn::fit_ridge(scaled.dataset);
  const VectorXd theta_lko = oracle::refit_without(scaled.dataset, {0});
  const VectorXd step = theta_full - theta_lko;

  const MatrixXd retained = base.dataset.features.bottomRows(cfg.n - 1);
  const MatrixXd gram = retained.transpose() * retained / double(cfg.n - 1);
  const VectorXd direction =
      gram.ldlt().solve(base.dataset.features.row(0).transpose());
  const double cosine =
      std::abs(step.dot(direction)) / (step.norm() * direction.norm());
  CHECK(cosine >= 0.99);
}

TEST_CASE("label sampling is well specified") {
  // theta* = 0 means fair coin flips.
  SplitMix64 fair_rng(41);
  const VectorXd zero_logits = VectorXd::Zero(10000);
  const VectorXd fair = unlearn::sample_labels(zero_logits, fair_rng);
  CHECK(std::abs(fair.mean() - 0.5) <= 4.0 * 0.5 / std::sqrt(10000.0));

  // At a fixed logit the positive rate matches the sigmoid.
  SplitMix64 rng(43);
  const double logit = 0.8;
  const VectorXd logits = VectorXd::Constant(10000, logit);
  const VectorXd labels = unlearn::sample_labels(logits, rng);
  const double p = 1.0 / (1.0 + std::exp(-logit));
  CHECK(std::abs(labels.mean() - p) <=
        4.0 * std::sqrt(p * (1.0 - p) / 10000.0));
}

TEST_CASE("logistic labels are binary and deterministic") {
  GenConfig cfg;
  cfg.d = 8;
  cfg.n = 200;
  cfg.k = 4;
  cfg.seed = 47;
  const auto out = unlearn::gen_logistic(cfg);
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    const double y = out.dataset.responses(i);
    CHECK((y == 0.0 || y == 1.0));
  }
}

TEST_CASE("logistic fit dataset satisfies the injection requirements") {
  GenConfig cfg;
  cfg.d = 10;
  cfg.n = 120;
  cfg.k = 12;
  cfg.sparsity_p = 0.4;
  cfg.ridge_lambda = 0.2;
  cfg.seed = 53;
  const auto out = unlearn::gen_fit_logistic(cfg);
  REQUIRE(out.injected_index.has_value());
  const Eigen::Index inj = *out.injected_index;

  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    CHECK(out.dataset.features(i, inj) == (i < cfg.k ? 1.0 : 0.0));
    if (i < cfg.k) CHECK(out.dataset.responses(i) == 1.0);
  }

  // Deleted rows are classified correctly by the refit full model.
  const VectorXd theta = unlearn::fit_logistic(
      out.dataset.features, out.dataset.responses, cfg.ridge_lambda);
  const VectorXd margins = out.dataset.features.topRows(cfg.k) * theta;
  CHECK(margins.minCoeff() > 0.0);
}

TEST_CASE("logistic fit generation reports an exhausted retry budget") {
  GenConfig cfg;
  cfg.d = 4;
  cfg.n = 30;
  cfg.k = 3;
  cfg.ridge_lambda = 0.2;
  cfg.seed = 59;
  CHECK_THROWS_AS(unlearn::gen_fit_logistic(cfg, -1), std::runtime_error);
}

TEST_CASE("logistic fit generation requires positive regularization") {
  GenConfig cfg;
  cfg.d = 4;
  cfg.n = 30;
  cfg.k = 3;
  cfg.ridge_lambda = 0.0;
  cfg.seed = 61;
  CHECK_THROWS_AS(unlearn::gen_fit_logistic(cfg), std::invalid_argument);
}

TEST_CASE("config validation") {
  GenConfig cfg;
  cfg.d = 4;
  cfg.n = 10;
  cfg.k = 10;  // k must stay below n
  CHECK_THROWS_AS(unlearn::gen_linear(cfg), std::invalid_argument);
  cfg.k = 2;
  cfg.sparsity_p = 0.0;
  CHECK_THROWS_AS(unlearn::gen_linear(cfg), std::invalid_argument);
  cfg.sparsity_p = 0.5;
  cfg.d = 1;
  CHECK_THROWS_AS(unlearn::gen_fit_linear(cfg), std::invalid_argument);
}
