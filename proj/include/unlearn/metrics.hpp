#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>

#include "unlearn/deletion.hpp"

namespace unlearn {

/// Normalized parameter distance |theta_lko - theta_approx| /
/// |theta_lko - theta_full|: 0 is exact deletion, 1 is no improvement.
/// Throws when the baseline distance is below 1e-14.
double l2_metric(const Eigen::VectorXd& theta_approx,
                 const Eigen::VectorXd& theta_lko,
                 const Eigen::VectorXd& theta_full);

/// Remaining weight on the injected feature as a fraction of the full
/// model's learned weight w_star. Throws when |w_star| <= 1e-12.
double fit_metric(const Eigen::VectorXd& theta_approx,
                  Eigen::Index injected_index, double w_star);

/// Per-trial metric values for one deletion method.
struct MetricRecord {
  double l2_ratio = 0.0;
  std::optional<double> fit_metric;
  DeletionMethod method = DeletionMethod::kExact;
  std::uint64_t trial_seed = 0;
};

/// Bundles the metrics for one deletion result against the refit baseline;
/// the FIT ratio is filled in only when an injected feature exists.
MetricRecord evaluate_deletion(const DeletionResult& result,
                               const Eigen::VectorXd& theta_lko,
                               const Eigen::VectorXd& theta_full,
                               std::optional<Eigen::Index> injected_index,
                               std::uint64_t trial_seed);

struct MeanStderr {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
  std::size_t count = 0;
};

struct MedianIqr {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  std::size_t count = 0;
};

MeanStderr mean_stderr(std::span<const double> values);
MedianIqr median_iqr(std::span<const double> values);

}  // namespace unlearn
