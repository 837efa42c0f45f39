#include "unlearn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace unlearn {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double l2_metric(const Eigen::VectorXd& theta_approx,
                 const Eigen::VectorXd& theta_lko,
                 const Eigen::VectorXd& theta_full) {
  if (theta_approx.size() != theta_lko.size() ||
      theta_lko.size() != theta_full.size())
    throw std::invalid_argument("l2_metric: parameter sizes differ");
  const double baseline = (theta_lko - theta_full).norm();
  if (baseline <= 1e-14)
    throw std::invalid_argument(
        "l2_metric: |theta_lko - theta_full| is degenerate, ratio undefined");
  return (theta_lko - theta_approx).norm() / baseline;
}

double fit_metric(const Eigen::VectorXd& theta_approx,
                  Eigen::Index injected_index, double w_star) {
  if (injected_index < 0 || injected_index >= theta_approx.size())
    throw std::invalid_argument("fit_metric: injected index out of range");
  if (std::abs(w_star) <= 1e-12)
    throw std::invalid_argument(
        "fit_metric: the full model did not learn the injected feature");
  return theta_approx(injected_index) / w_star;
}

MetricRecord evaluate_deletion(const DeletionResult& result,
                               const Eigen::VectorXd& theta_lko,
                               const Eigen::VectorXd& theta_full,
                               std::optional<Eigen::Index> injected_index,
                               std::uint64_t trial_seed) {
  MetricRecord record;
  record.method = result.method;
  record.trial_seed = trial_seed;
  record.l2_ratio = l2_metric(result.theta, theta_lko, theta_full);
  if (injected_index)
    record.fit_metric = fit_metric(result.theta, *injected_index,
                                   theta_full(*injected_index));
  return record;
}

MeanStderr mean_stderr(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("mean_stderr: empty sample");
  MeanStderr out;
  out.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double variance = ss / static_cast<double>(values.size() - 1);
    out.stderr_of_mean =
        std::sqrt(variance / static_cast<double>(values.size()));
  }
  return out;
}

MedianIqr median_iqr(std::span<const double> values) {
  if (values.empty())
    throw std::invalid_argument("median_iqr: empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  MedianIqr out;
  out.count = sorted.size();
  out.median = quantile_sorted(sorted, 0.5);
  out.q1 = quantile_sorted(sorted, 0.25);
  out.q3 = quantile_sorted(sorted, 0.75);
  return out;
}

}  // namespace unlearn
