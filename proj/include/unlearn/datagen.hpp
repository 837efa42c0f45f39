#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "unlearn/linear.hpp"
#include "unlearn/rng.hpp"

namespace unlearn {

/// Synthetic dataset recipe. n == 0 means the default n = 10 d. The deleted
/// set is always the first k rows; library calls still accept arbitrary
/// index sets.
struct GenConfig {
  Eigen::Index n = 0;
  Eigen::Index d = 0;
  Eigen::Index k = 0;
  double noise_sigma2 = 1.0;
  double sparsity_p = 1.0;     // fraction of entries kept nonzero
  double outlier_scale = 1.0;  // multiplier applied by scale_outliers
  double w_star = 10.0;        // true weight of the injected feature
  double ridge_lambda = 0.1;   // copied into the generated Dataset
  std::uint64_t seed = 0;
};

struct GenOutput {
  Dataset dataset;
  Eigen::VectorXd theta_star;
  std::optional<Eigen::Index> injected_index;
  std::vector<Eigen::Index> deleted_indices;
};

/// Random SPD matrix: QR of a Gaussian matrix rotated against eigenvalues
/// drawn uniformly from [0.05, 2], so the smallest eigenvalue is at least
/// 0.05. Exactly symmetric by construction. gen_linear(cfg) draws its row
/// covariance from this same (d, seed) stream.
Eigen::MatrixXd gen_spd_covariance(Eigen::Index d, std::uint64_t seed);

/// Rows i.i.d. N(0, Sigma), responses Y = X theta_star + noise.
GenOutput gen_linear(const GenConfig& cfg);

/// Multiplies the first k feature rows and responses by outlier_scale.
GenOutput scale_outliers(GenOutput out, double outlier_scale);

/// Feature-injection dataset: the last column is nonzero only in the first k
/// rows, the first k rows share a common sparsity pattern over the remaining
/// columns, and their responses equal w_star times the injected entry.
GenOutput gen_fit_linear(const GenConfig& cfg);

/// Well-specified logistic labels: P(y = 1 | x) = sigmoid(x . theta_star).
/// When sparsity_p < 1 the covariates are sparsified the same way as the
/// feature-injection recipe (common pattern on the first k rows).
GenOutput gen_logistic(const GenConfig& cfg);

/// Logistic feature-injection dataset: deleted rows have injected feature 1
/// and label 1 and must be classified correctly by the fitted full model;
/// the dataset is redrawn (up to max_retries times) until that holds.
GenOutput gen_fit_logistic(const GenConfig& cfg, int max_retries = 50);

/// Bernoulli labels from logits; exposed so the label mechanism can be
/// validated directly.
Eigen::VectorXd sample_labels(const Eigen::VectorXd& logits, SplitMix64& rng);

}  // namespace unlearn
