#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace unlearn {

/// Grid and execution settings for one experiment family. Defaults keep
/// runs desk-sized; larger grids can come from a config file.
struct ExperimentConfig {
  std::string experiment;  // runtime | l2 | fit | logistic-l2 | logistic-fit
  std::vector<Eigen::Index> d_list{100, 200, 400};
  std::vector<Eigen::Index> k_list{1, 5, 10, 25};
  std::vector<double> p_list{0.25, 0.1, 0.05};
  std::vector<double> scale_list{1.0, 10.0, 100.0};
  int trials = 10;
  int repetitions = 5;  // timing repeats per cell, after two warm-ups
  double ridge_lambda = 0.1;
  std::uint64_t seed = 42;
  int n_multiplier = 10;  // n = n_multiplier * d
  double w_star = 10.0;
  double noise_sigma2 = 1.0;
  int workers = 1;  // trial parallelism; timing runs always use one
  Eigen::Index max_hat_rows = 30000;
  std::string output_path;  // empty writes to stdout
  std::string format = "csv";
};

void validate(const ExperimentConfig& config);

struct ReportRow {
  std::string method;
  std::string metric;
  Eigen::Index d = 0;
  Eigen::Index k = 0;
  double sparsity = 1.0;
  double outlier_scale = 1.0;
  int trial = 0;
  std::uint64_t trial_seed = 0;
  double value = 0.0;
  double baseline = 0.0;
};

struct AggregateRow {
  std::string method;
  std::string metric;
  std::string stat;  // mean | median | median_seconds | fraction_of_exact
  Eigen::Index d = 0;
  Eigen::Index k = 0;
  double sparsity = 1.0;
  double outlier_scale = 1.0;
  double center = 0.0;
  double lo = 0.0;  // stderr for mean stats, first quartile for medians
  double hi = 0.0;
  int count = 0;
};

struct ExperimentReport {
  std::string experiment;
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  std::vector<AggregateRow> aggregates;
  std::string timestamp;
  std::string version;
};

ExperimentReport run_runtime(const ExperimentConfig& config);
ExperimentReport run_l2(const ExperimentConfig& config);
ExperimentReport run_fit(const ExperimentConfig& config);
ExperimentReport run_logistic_l2(const ExperimentConfig& config);
ExperimentReport run_logistic_fit(const ExperimentConfig& config);

/// Dispatch on config.experiment.
ExperimentReport run_experiment(const ExperimentConfig& config);

std::string rows_to_csv(const ExperimentReport& report);
std::string report_to_json(const ExperimentReport& report);
std::string report_to_markdown(const ExperimentReport& report);

/// Plain key = value lines, '#' comments; lists are comma separated. Only
/// keys present in the file are touched, so defaults and flags layer around
/// it.
void load_config_file(ExperimentConfig& config,
                      const std::filesystem::path& path);
ExperimentConfig parse_config_file(const std::filesystem::path& path);
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

std::string library_version();

}  // namespace unlearn
