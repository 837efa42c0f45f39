#include "unlearn/datagen.hpp"

#include <Eigen/QR>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "unlearn/errors.hpp"
#include "unlearn/logistic.hpp"

namespace unlearn {

namespace {

constexpr double kEigMin = 0.05;
constexpr double kEigMax = 2.0;

struct CovFactor {
  Eigen::MatrixXd rotation;     // d x d orthogonal
  Eigen::VectorXd eigenvalues;  // d, in [kEigMin, kEigMax]
};

// Streams "cov.g" and "cov.eig" of the dataset seed.
CovFactor random_cov_factor(Eigen::Index d, std::uint64_t seed) {
  SplitMix64 grng(stream_seed(seed, "cov.g"));
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = grng.next_normal();

  CovFactor f;
  f.rotation = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  SplitMix64 erng(stream_seed(seed, "cov.eig"));
  f.eigenvalues.resize(d);
  for (Eigen::Index i = 0; i < d; ++i)
    f.eigenvalues(i) = kEigMin + (kEigMax - kEigMin) * erng.next_uniform();
  return f;
}

// n rows i.i.d. N(0, rotation diag(eigenvalues) rotation^T); stream "x".
Eigen::MatrixXd draw_rows(Eigen::Index n, const CovFactor& f,
                          std::uint64_t seed) {
  const Eigen::Index d = f.eigenvalues.size();
  SplitMix64 rng(stream_seed(seed, "x"));
  Eigen::MatrixXd z(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = rng.next_normal();
  return z * (f.eigenvalues.cwiseSqrt().asDiagonal() * f.rotation.transpose());
}

Eigen::VectorXd draw_theta_star(Eigen::Index d, std::uint64_t seed,
                                double scale) {
  SplitMix64 rng(stream_seed(seed, "theta"));
  Eigen::VectorXd theta(d);
  for (Eigen::Index i = 0; i < d; ++i) theta(i) = scale * rng.next_normal();
  return theta;
}

Eigen::VectorXd draw_noise(Eigen::Index n, double sigma2, std::uint64_t seed) {
  SplitMix64 rng(stream_seed(seed, "noise"));
  const double sigma = std::sqrt(sigma2);
  Eigen::VectorXd eps(n);
  for (Eigen::Index i = 0; i < n; ++i) eps(i) = sigma * rng.next_normal();
  return eps;
}

// Zeroes columns [0, last_col) with probability 1 - p: one shared draw per
// column for the first k rows, then independent draws for the rest,
// row-major. Stream "sparsity".
void sparsify(Eigen::MatrixXd& x, Eigen::Index k, Eigen::Index last_col,
              double p, std::uint64_t seed) {
  if (p >= 1.0) return;
  SplitMix64 rng(stream_seed(seed, "sparsity"));
  for (Eigen::Index j = 0; j < last_col; ++j)
    if (rng.next_uniform() >= p) x.block(0, j, k, 1).setZero();
  for (Eigen::Index i = k; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < last_col; ++j)
      if (rng.next_uniform() >= p) x(i, j) = 0.0;
}

Eigen::Index resolve_n(const GenConfig& cfg) {
  return cfg.n > 0 ? cfg.n : 10 * cfg.d;
}

void validate_config(const GenConfig& cfg, Eigen::Index min_k) {
  if (cfg.d < 1) throw std::invalid_argument("GenConfig: d must be >= 1");
  const Eigen::Index n = resolve_n(cfg);
  if (cfg.k < min_k || cfg.k >= n)
    throw std::invalid_argument("GenConfig: need " + std::to_string(min_k) +
                                " <= k < n");
  if (!(cfg.sparsity_p > 0.0 && cfg.sparsity_p <= 1.0))
    throw std::invalid_argument("GenConfig: sparsity_p must be in (0, 1]");
  if (!(cfg.outlier_scale > 0.0))
    throw std::invalid_argument("GenConfig: outlier_scale must be positive");
  if (!(cfg.noise_sigma2 >= 0.0))
    throw std::invalid_argument("GenConfig: noise_sigma2 must be >= 0");
  if (!(cfg.ridge_lambda >= 0.0))
    throw std::invalid_argument("GenConfig: ridge_lambda must be >= 0");
}

std::vector<Eigen::Index> first_k(Eigen::Index k) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

}  // namespace

Eigen::MatrixXd gen_spd_covariance(Eigen::Index d, std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("gen_spd_covariance: d must be >= 1");
  const CovFactor f = random_cov_factor(d, seed);
  Eigen::MatrixXd cov =
      f.rotation * f.eigenvalues.asDiagonal() * f.rotation.transpose();
  // Mirror the lower triangle so the result is exactly symmetric.
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = j + 1; i < d; ++i) cov(j, i) = cov(i, j);
  return cov;
}

GenOutput gen_linear(const GenConfig& cfg) {
  validate_config(cfg, 0);
  const Eigen::Index n = resolve_n(cfg);
  const CovFactor f = random_cov_factor(cfg.d, cfg.seed);

  GenOutput out;
  out.dataset.features = draw_rows(n, f, cfg.seed);
  out.theta_star = draw_theta_star(cfg.d, cfg.seed, 1.0);
  out.dataset.responses = out.dataset.features * out.theta_star +
                          draw_noise(n, cfg.noise_sigma2, cfg.seed);
  out.dataset.ridge_lambda = cfg.ridge_lambda;
  out.deleted_indices = first_k(cfg.k);
  return out;
}

GenOutput scale_outliers(GenOutput out, double outlier_scale) {
  if (!(outlier_scale > 0.0))
    throw std::invalid_argument("scale_outliers: scale must be positive");
  if (out.deleted_indices.empty())
    throw std::invalid_argument("scale_outliers: no deleted rows to scale");
  for (Eigen::Index idx : out.deleted_indices) {
    out.dataset.features.row(idx) *= outlier_scale;
    out.dataset.responses(idx) *= outlier_scale;
  }
  return out;
}

GenOutput gen_fit_linear(const GenConfig& cfg) {
  validate_config(cfg, 1);
  if (cfg.d < 2)
    throw std::invalid_argument("gen_fit_linear: need d >= 2 for an injected column");
  const Eigen::Index n = resolve_n(cfg);
  const Eigen::Index inj = cfg.d - 1;
  const CovFactor f = random_cov_factor(cfg.d, cfg.seed);

  GenOutput out;
  out.dataset.features = draw_rows(n, f, cfg.seed);
  out.dataset.features.block(cfg.k, inj, n - cfg.k, 1).setZero();
  sparsify(out.dataset.features, cfg.k, inj, cfg.sparsity_p, cfg.seed);

  out.theta_star = draw_theta_star(cfg.d, cfg.seed, 1.0);
  out.dataset.responses = out.dataset.features * out.theta_star +
                          draw_noise(n, cfg.noise_sigma2, cfg.seed);
  for (Eigen::Index i = 0; i < cfg.k; ++i)
    out.dataset.responses(i) = cfg.w_star * out.dataset.features(i, inj);

  out.dataset.ridge_lambda = cfg.ridge_lambda;
  out.injected_index = inj;
  out.deleted_indices = first_k(cfg.k);
  return out;
}

GenOutput gen_logistic(const GenConfig& cfg) {
  validate_config(cfg, 0);
  const Eigen::Index n = resolve_n(cfg);
  const CovFactor f = random_cov_factor(cfg.d, cfg.seed);

  GenOutput out;
  out.dataset.features = draw_rows(n, f, cfg.seed);
  if (cfg.sparsity_p < 1.0)
    sparsify(out.dataset.features, std::max<Eigen::Index>(cfg.k, 1), cfg.d,
             cfg.sparsity_p, cfg.seed);

  // Unit-scale parameter so logits stay O(1).
  out.theta_star =
      draw_theta_star(cfg.d, cfg.seed, 1.0 / std::sqrt(double(cfg.d)));
  SplitMix64 lrng(stream_seed(cfg.seed, "labels"));
  out.dataset.responses =
      sample_labels(out.dataset.features * out.theta_star, lrng);
  out.dataset.ridge_lambda = cfg.ridge_lambda;
  out.deleted_indices = first_k(cfg.k);
  return out;
}

GenOutput gen_fit_logistic(const GenConfig& cfg, int max_retries) {
  validate_config(cfg, 1);
  if (cfg.d < 2)
    throw std::invalid_argument(
        "gen_fit_logistic: need d >= 2 for an injected column");
  if (!(cfg.ridge_lambda > 0.0))
    throw std::invalid_argument(
        "gen_fit_logistic: the feature injection test requires a strictly "
        "positive ridge_lambda");
  const Eigen::Index n = resolve_n(cfg);
  const Eigen::Index inj = cfg.d - 1;

  int nonconverged = 0;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    const std::uint64_t sub = stream_seed(cfg.seed, "attempt",
                                          static_cast<std::uint64_t>(attempt));
    const CovFactor f = random_cov_factor(cfg.d, sub);

    GenOutput out;
    out.dataset.features = draw_rows(n, f, sub);
    out.dataset.features.col(inj).setZero();
    out.dataset.features.block(0, inj, cfg.k, 1).setOnes();
    sparsify(out.dataset.features, cfg.k, inj, cfg.sparsity_p, sub);

    out.theta_star =
        draw_theta_star(cfg.d, sub, 1.0 / std::sqrt(double(cfg.d)));
    SplitMix64 lrng(stream_seed(sub, "labels"));
    out.dataset.responses =
        sample_labels(out.dataset.features * out.theta_star, lrng);
    out.dataset.responses.head(cfg.k).setOnes();
    out.dataset.ridge_lambda = cfg.ridge_lambda;
    out.injected_index = inj;
    out.deleted_indices = first_k(cfg.k);

    // Deleted points must be classified correctly by the fitted full model;
    // a draw whose fit does not converge counts as a failed attempt.
    try {
      const Eigen::VectorXd theta_fit = fit_logistic(
          out.dataset.features, out.dataset.responses, cfg.ridge_lambda);
      const Eigen::VectorXd margins =
          out.dataset.features.topRows(cfg.k) * theta_fit;
      if (margins.minCoeff() > 0.0) return out;
    } catch (const ConvergenceError&) {
      ++nonconverged;
    }
  }
  throw std::runtime_error(
      "gen_fit_logistic: could not satisfy the classification requirement "
      "within " +
      std::to_string(max_retries + 1) + " attempts (" +
      std::to_string(nonconverged) + " fits did not converge)");
}

Eigen::VectorXd sample_labels(const Eigen::VectorXd& logits, SplitMix64& rng) {
  Eigen::VectorXd labels(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-logits(i)));
    labels(i) = rng.next_uniform() < p ? 1.0 : 0.0;
  }
  return labels;
}

}  // namespace unlearn
