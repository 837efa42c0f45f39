#include "unlearn/bench.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "unlearn/datagen.hpp"
#include "unlearn/deletion.hpp"
#include "unlearn/linear.hpp"
#include "unlearn/logistic.hpp"
#include "unlearn/metrics.hpp"
#include "unlearn/rng.hpp"

namespace unlearn {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string iso_timestamp_utc() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t trial_stream(const ExperimentConfig& cfg, Eigen::Index d,
                           Eigen::Index k, double p, double scale, int trial) {
  std::uint64_t s = stream_seed(cfg.seed, cfg.experiment);
  s = mix_seed(s, static_cast<std::uint64_t>(d));
  s = mix_seed(s, static_cast<std::uint64_t>(k));
  s = mix_seed(s, std::bit_cast<std::uint64_t>(p));
  s = mix_seed(s, std::bit_cast<std::uint64_t>(scale));
  s = mix_seed(s, static_cast<std::uint64_t>(trial));
  return s;
}

void parallel_for(int workers, std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int thread_count =
      static_cast<int>(std::min<std::size_t>(count, workers));
  std::vector<std::thread> pool;
  for (int t = 1; t < thread_count; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Dataset drop_rows(const Dataset& data,
                  const std::vector<Eigen::Index>& deleted) {
  std::vector<bool> is_deleted(static_cast<std::size_t>(data.n()), false);
  for (Eigen::Index idx : deleted)
    is_deleted[static_cast<std::size_t>(idx)] = true;
  const Eigen::Index kept =
      data.n() - static_cast<Eigen::Index>(deleted.size());
  Dataset out;
  out.features.resize(kept, data.d());
  out.responses.resize(kept);
  if (data.has_weights()) out.weights.resize(kept);
  out.ridge_lambda = data.ridge_lambda;
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (is_deleted[static_cast<std::size_t>(i)]) continue;
    out.features.row(row) = data.features.row(i);
    out.responses(row) = data.responses(i);
    if (data.has_weights()) out.weights(row) = data.weights(i);
    ++row;
  }
  return out;
}

void check_memory_budget(const ExperimentConfig& cfg) {
  const Eigen::Index max_d =
      *std::max_element(cfg.d_list.begin(), cfg.d_list.end());
  const Eigen::Index max_n = cfg.n_multiplier * max_d;
  if (max_n > cfg.max_hat_rows)
    throw std::invalid_argument(
        "experiment grid needs a dense hat matrix with " +
        std::to_string(max_n) + " rows, above the budget of " +
        std::to_string(cfg.max_hat_rows) +
        " (raise max_hat_rows explicitly to proceed)");
}

ExperimentReport make_report(const ExperimentConfig& cfg) {
  ExperimentReport report;
  report.experiment = cfg.experiment;
  report.config = cfg;
  report.timestamp = iso_timestamp_utc();
  report.version = kVersion;
  return report;
}

using CellKey =
    std::tuple<std::string, std::string, Eigen::Index, Eigen::Index, double,
               double>;

CellKey row_cell(const ReportRow& row) {
  return {row.method, row.metric, row.d, row.k, row.sparsity,
          row.outlier_scale};
}

// Mean +- stderr for the linear families, median + IQR for logistic.
void append_aggregates(ExperimentReport& report, bool use_median) {
  std::map<CellKey, std::vector<double>> cells;
  for (const ReportRow& row : report.rows)
    cells[row_cell(row)].push_back(row.value);
  for (const auto& [key, values] : cells) {
    AggregateRow agg;
    agg.method = std::get<0>(key);
    agg.metric = std::get<1>(key);
    agg.d = std::get<2>(key);
    agg.k = std::get<3>(key);
    agg.sparsity = std::get<4>(key);
    agg.outlier_scale = std::get<5>(key);
    agg.count = static_cast<int>(values.size());
    if (use_median) {
      const MedianIqr m = median_iqr(values);
      agg.stat = "median";
      agg.center = m.median;
      agg.lo = m.q1;
      agg.hi = m.q3;
    } else {
      const MeanStderr m = mean_stderr(values);
      agg.stat = "mean";
      agg.center = m.mean;
      agg.lo = m.stderr_of_mean;
      agg.hi = m.stderr_of_mean;
    }
    report.aggregates.push_back(std::move(agg));
  }
}

struct GridTask {
  Eigen::Index d = 0;
  Eigen::Index k = 0;
  double p = 1.0;
  double scale = 1.0;
  int trial = 0;
};

std::vector<GridTask> metric_grid(const ExperimentConfig& cfg, bool use_p,
                                  bool use_scale) {
  std::vector<GridTask> tasks;
  const std::vector<double> ones{1.0};
  const auto& ps = use_p ? cfg.p_list : ones;
  const auto& scales = use_scale ? cfg.scale_list : ones;
  for (Eigen::Index d : cfg.d_list)
    for (Eigen::Index k : cfg.k_list)
      for (double p : ps)
        for (double scale : scales)
          for (int trial = 0; trial < cfg.trials; ++trial)
            tasks.push_back({d, k, p, scale, trial});
  return tasks;
}

GenConfig base_gen_config(const ExperimentConfig& cfg, const GridTask& task,
                          std::uint64_t seed) {
  GenConfig gen;
  gen.n = cfg.n_multiplier * task.d;
  gen.d = task.d;
  gen.k = task.k;
  gen.noise_sigma2 = cfg.noise_sigma2;
  gen.sparsity_p = task.p;
  gen.outlier_scale = task.scale;
  gen.w_star = cfg.w_star;
  gen.ridge_lambda = cfg.ridge_lambda;
  gen.seed = seed;
  return gen;
}

ReportRow base_row(const GridTask& task, std::uint64_t seed) {
  ReportRow row;
  row.d = task.d;
  row.k = task.k;
  row.sparsity = task.p;
  row.outlier_scale = task.scale;
  row.trial = task.trial;
  row.trial_seed = seed;
  return row;
}

void run_metric_tasks(
    const ExperimentConfig& cfg, ExperimentReport& report,
    const std::vector<GridTask>& tasks,
    const std::function<std::vector<ReportRow>(const GridTask&)>& run_one) {
  std::vector<std::vector<ReportRow>> results(tasks.size());
  parallel_for(cfg.workers, tasks.size(),
               [&](std::size_t i) { results[i] = run_one(tasks[i]); });
  for (auto& rows : results)
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  static const char* kKnown[] = {"runtime", "l2", "fit", "logistic-l2",
                                 "logistic-fit"};
  if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* e) {
        return cfg.experiment == e;
      }) == std::end(kKnown))
    throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
  if (cfg.d_list.empty() || cfg.k_list.empty())
    throw std::invalid_argument("d_list and k_list must be nonempty");
  if ((cfg.experiment == "fit" || cfg.experiment == "logistic-l2" ||
       cfg.experiment == "logistic-fit") &&
      cfg.p_list.empty())
    throw std::invalid_argument("p_list must be nonempty");
  if (cfg.experiment == "l2" && cfg.scale_list.empty())
    throw std::invalid_argument("scale_list must be nonempty");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.repetitions < 1)
    throw std::invalid_argument("repetitions must be >= 1");
  if (cfg.n_multiplier < 1)
    throw std::invalid_argument("n_multiplier must be >= 1");
  if (cfg.workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (cfg.format != "csv" && cfg.format != "json" && cfg.format != "md")
    throw std::invalid_argument("format must be csv, json or md");
  for (Eigen::Index d : cfg.d_list)
    if (d < 1) throw std::invalid_argument("d values must be >= 1");
  for (Eigen::Index k : cfg.k_list)
    if (k < 1) throw std::invalid_argument("k values must be >= 1");
}

ExperimentReport run_l2(const ExperimentConfig& cfg) {
  validate(cfg);
  check_memory_budget(cfg);
  ExperimentReport report = make_report(cfg);
  const auto tasks = metric_grid(cfg, /*use_p=*/false, /*use_scale=*/true);

  run_metric_tasks(cfg, report, tasks, [&](const GridTask& task) {
    const std::uint64_t seed =
        trial_stream(cfg, task.d, task.k, task.p, task.scale, task.trial);
    GenOutput out =
        scale_outliers(gen_linear(base_gen_config(cfg, task, seed)),
                       task.scale);
    PrecomputeOptions opts;
    opts.max_hat_rows = cfg.max_hat_rows;
    const PrecomputedModel model = precompute(out.dataset, opts);
    const Eigen::VectorXd theta_lko =
        fit_ridge(drop_rows(out.dataset, out.deleted_indices));
    const double baseline = (model.theta_full - theta_lko).norm();
    const DeletionRequest req{out.deleted_indices};

    std::vector<ReportRow> rows;
    for (DeletionMethod method :
         {DeletionMethod::kExact, DeletionMethod::kInfluence,
          DeletionMethod::kPru}) {
      const MetricRecord record =
          evaluate_deletion(delete_points(model, req, method), theta_lko,
                            model.theta_full, std::nullopt, seed);
      ReportRow row = base_row(task, seed);
      row.method = method_name(record.method);
      row.metric = "l2_ratio";
      row.value = record.l2_ratio;
      row.baseline = baseline;
      rows.push_back(std::move(row));
    }
    return rows;
  });

  append_aggregates(report, /*use_median=*/false);
  return report;
}

ExperimentReport run_fit(const ExperimentConfig& cfg) {
  validate(cfg);
  check_memory_budget(cfg);
  ExperimentReport report = make_report(cfg);
  const auto tasks = metric_grid(cfg, /*use_p=*/true, /*use_scale=*/false);

  run_metric_tasks(cfg, report, tasks, [&](const GridTask& task) {
    const std::uint64_t seed =
        trial_stream(cfg, task.d, task.k, task.p, task.scale, task.trial);
    const GenOutput out = gen_fit_linear(base_gen_config(cfg, task, seed));
    PrecomputeOptions opts;
    opts.max_hat_rows = cfg.max_hat_rows;
    const PrecomputedModel model = precompute(out.dataset, opts);
    const Eigen::Index inj = *out.injected_index;
    const double learned_w = model.theta_full(inj);
    const DeletionRequest req{out.deleted_indices};

    std::vector<ReportRow> rows;
    for (DeletionMethod method :
         {DeletionMethod::kExact, DeletionMethod::kInfluence,
          DeletionMethod::kPru}) {
      const DeletionResult res = delete_points(model, req, method);
      ReportRow row = base_row(task, seed);
      row.method = method_name(method);
      row.metric = "fit_metric";
      row.value = fit_metric(res.theta, inj, learned_w);
      row.baseline = learned_w;
      rows.push_back(std::move(row));
    }
    return rows;
  });

  append_aggregates(report, /*use_median=*/false);
  return report;
}

ExperimentReport run_logistic_l2(const ExperimentConfig& cfg) {
  validate(cfg);
  check_memory_budget(cfg);
  ExperimentReport report = make_report(cfg);
  const auto tasks = metric_grid(cfg, /*use_p=*/true, /*use_scale=*/false);

  run_metric_tasks(cfg, report, tasks, [&](const GridTask& task) {
    const std::uint64_t seed =
        trial_stream(cfg, task.d, task.k, task.p, task.scale, task.trial);
    const GenOutput out = gen_logistic(base_gen_config(cfg, task, seed));
    const Eigen::VectorXd theta_full = fit_logistic(
        out.dataset.features, out.dataset.responses, cfg.ridge_lambda);
    PrecomputeOptions opts;
    opts.max_hat_rows = cfg.max_hat_rows;
    const LogisticModel model =
        logistic_precompute(out.dataset.features, out.dataset.responses,
                            theta_full, cfg.ridge_lambda, opts);
    const Dataset retained = drop_rows(out.dataset, out.deleted_indices);
    const Eigen::VectorXd theta_lko =
        fit_logistic(retained.features, retained.responses, cfg.ridge_lambda);
    const double baseline = (theta_full - theta_lko).norm();
    const DeletionRequest req{out.deleted_indices};

    std::vector<ReportRow> rows;
    for (DeletionMethod method :
         {DeletionMethod::kNewton, DeletionMethod::kInfluence,
          DeletionMethod::kPru}) {
      const MetricRecord record = evaluate_deletion(
          logistic_delete_points(model, req, method), theta_lko, theta_full,
          std::nullopt, seed);
      ReportRow row = base_row(task, seed);
      row.method = method_name(record.method);
      row.metric = "l2_ratio";
      row.value = record.l2_ratio;
      row.baseline = baseline;
      rows.push_back(std::move(row));
    }
    return rows;
  });

  append_aggregates(report, /*use_median=*/true);
  return report;
}

ExperimentReport run_logistic_fit(const ExperimentConfig& cfg) {
  validate(cfg);
  check_memory_budget(cfg);
  ExperimentReport report = make_report(cfg);
  const auto tasks = metric_grid(cfg, /*use_p=*/true, /*use_scale=*/false);

  run_metric_tasks(cfg, report, tasks, [&](const GridTask& task) {
    const std::uint64_t seed =
        trial_stream(cfg, task.d, task.k, task.p, task.scale, task.trial);
    const GenOutput out = gen_fit_logistic(base_gen_config(cfg, task, seed));
    const Eigen::VectorXd theta_full = fit_logistic(
        out.dataset.features, out.dataset.responses, cfg.ridge_lambda);
    PrecomputeOptions opts;
    opts.max_hat_rows = cfg.max_hat_rows;
    const LogisticModel model =
        logistic_precompute(out.dataset.features, out.dataset.responses,
                            theta_full, cfg.ridge_lambda, opts);
    const Eigen::Index inj = *out.injected_index;
    const double learned_w = theta_full(inj);
    const DeletionRequest req{out.deleted_indices};

    std::vector<ReportRow> rows;
    for (DeletionMethod method :
         {DeletionMethod::kNewton, DeletionMethod::kInfluence,
          DeletionMethod::kPru}) {
      const DeletionResult res = logistic_delete_points(model, req, method);
      ReportRow row = base_row(task, seed);
      row.method = method_name(method);
      row.metric = "fit_metric";
      row.value = fit_metric(res.theta, inj, learned_w);
      row.baseline = learned_w;
      rows.push_back(std::move(row));
    }
    return rows;
  });

  append_aggregates(report, /*use_median=*/true);
  return report;
}

ExperimentReport run_runtime(const ExperimentConfig& cfg) {
  validate(cfg);
  check_memory_budget(cfg);
  ExperimentReport report = make_report(cfg);

  const DeletionMethod methods[] = {DeletionMethod::kExact,
                                    DeletionMethod::kInfluence,
                                    DeletionMethod::kPru};

  // Timing is contractually single threaded; cfg.workers is ignored here.
  for (Eigen::Index d : cfg.d_list) {
    for (Eigen::Index k : cfg.k_list) {
      const GridTask task{d, k, 1.0, 1.0, 0};
      const std::uint64_t seed = trial_stream(cfg, d, k, 1.0, 1.0, 0);
      const GenOutput out = gen_linear(base_gen_config(cfg, task, seed));
      PrecomputeOptions opts;
      opts.max_hat_rows = cfg.max_hat_rows;
      const PrecomputedModel model = precompute(out.dataset, opts);
      const DeletionRequest req{out.deleted_indices};

      for (int warm = 0; warm < 2; ++warm)
        for (DeletionMethod method : methods)
          (void)delete_points(model, req, method);

      std::map<DeletionMethod, std::vector<double>> times;
      for (int rep = 0; rep < cfg.repetitions; ++rep) {
        for (DeletionMethod method : methods) {
          const DeletionResult res = delete_points(model, req, method);
          times[method].push_back(res.online_seconds);
        }
      }

      const double exact_median =
          median_iqr(times[DeletionMethod::kExact]).median;
      for (DeletionMethod method : methods) {
        const MedianIqr m = median_iqr(times[method]);
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
          ReportRow row = base_row(task, seed);
          row.trial = rep;
          row.method = method_name(method);
          row.metric = "online_seconds";
          row.value = times[method][static_cast<std::size_t>(rep)];
          row.baseline = exact_median;
          report.rows.push_back(std::move(row));
        }
        AggregateRow seconds;
        seconds.method = method_name(method);
        seconds.metric = "online_seconds";
        seconds.stat = "median_seconds";
        seconds.d = d;
        seconds.k = k;
        seconds.center = m.median;
        seconds.lo = m.q1;
        seconds.hi = m.q3;
        seconds.count = cfg.repetitions;
        report.aggregates.push_back(seconds);

        AggregateRow fraction = seconds;
        fraction.metric = "fraction_of_exact";
        fraction.stat = "fraction_of_exact";
        fraction.center = m.median / exact_median;
        fraction.lo = fraction.hi = 0.0;
        report.aggregates.push_back(fraction);
      }
    }
  }
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "runtime") return run_runtime(cfg);
  if (cfg.experiment == "l2") return run_l2(cfg);
  if (cfg.experiment == "fit") return run_fit(cfg);
  if (cfg.experiment == "logistic-l2") return run_logistic_l2(cfg);
  if (cfg.experiment == "logistic-fit") return run_logistic_fit(cfg);
  throw std::invalid_argument("unknown experiment '" + cfg.experiment + "'");
}

std::string rows_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "experiment,method,metric,d,k,p,outlier_scale,trial,trial_seed,"
         "value,baseline\n";
  for (const ReportRow& row : report.rows) {
    out << report.experiment << ',' << row.method << ',' << row.metric << ','
        << row.d << ',' << row.k << ',' << format_double(row.sparsity) << ','
        << format_double(row.outlier_scale) << ',' << row.trial << ','
        << row.trial_seed << ',' << format_double(row.value) << ','
        << format_double(row.baseline) << '\n';
  }
  return out.str();
}

std::string report_to_json(const ExperimentReport& report) {
  nlohmann::json meta;
  meta["experiment"] = report.experiment;
  meta["timestamp"] = report.timestamp;
  meta["version"] = report.version;
  meta["seed"] = report.config.seed;
  meta["trials"] = report.config.trials;
  meta["repetitions"] = report.config.repetitions;
  meta["ridge_lambda"] = report.config.ridge_lambda;
  meta["n_multiplier"] = report.config.n_multiplier;
  meta["w_star"] = report.config.w_star;
  meta["noise_sigma2"] = report.config.noise_sigma2;
  meta["workers"] = report.config.workers;
  meta["d_list"] = report.config.d_list;
  meta["k_list"] = report.config.k_list;
  meta["p_list"] = report.config.p_list;
  meta["scale_list"] = report.config.scale_list;

  nlohmann::json aggregates = nlohmann::json::array();
  for (const AggregateRow& agg : report.aggregates) {
    aggregates.push_back({{"method", agg.method},
                          {"metric", agg.metric},
                          {"stat", agg.stat},
                          {"d", agg.d},
                          {"k", agg.k},
                          {"p", agg.sparsity},
                          {"outlier_scale", agg.outlier_scale},
                          {"center", agg.center},
                          {"lo", agg.lo},
                          {"hi", agg.hi},
                          {"count", agg.count}});
  }

  nlohmann::json j;
  j["meta"] = meta;
  j["aggregates"] = aggregates;
  j["row_count"] = report.rows.size();
  return j.dump(2) + "\n";
}

std::string report_to_markdown(const ExperimentReport& report) {
  // Column axis per experiment: d for runtime, outlier scale for l2,
  // sparsity for the rest.
  enum class Axis { kD, kScale, kSparsity } axis;
  if (report.experiment == "runtime")
    axis = Axis::kD;
  else if (report.experiment == "l2")
    axis = Axis::kScale;
  else
    axis = Axis::kSparsity;

  std::vector<double> columns;
  for (const AggregateRow& agg : report.aggregates) {
    const double c = axis == Axis::kD ? static_cast<double>(agg.d)
                     : axis == Axis::kScale ? agg.outlier_scale
                                            : agg.sparsity;
    if (std::find(columns.begin(), columns.end(), c) == columns.end())
      columns.push_back(c);
  }
  std::sort(columns.begin(), columns.end());
  if (axis == Axis::kSparsity) std::reverse(columns.begin(), columns.end());

  auto column_of = [&](const AggregateRow& agg) {
    return axis == Axis::kD ? static_cast<double>(agg.d)
           : axis == Axis::kScale ? agg.outlier_scale
                                  : agg.sparsity;
  };
  auto axis_name = [&]() {
    return axis == Axis::kD ? "d" : axis == Axis::kScale ? "scale" : "p";
  }();

  std::ostringstream out;
  out << "# " << report.experiment << " experiment\n\n";
  out << "seed " << report.config.seed << ", trials " << report.config.trials
      << ", lambda " << format_double(report.config.ridge_lambda)
      << ", version " << report.version << "\n";

  // One table per (metric, stat, d-if-not-column).
  std::map<std::tuple<std::string, std::string, Eigen::Index>,
           std::vector<const AggregateRow*>>
      tables;
  for (const AggregateRow& agg : report.aggregates) {
    const Eigen::Index table_d = axis == Axis::kD ? 0 : agg.d;
    tables[{agg.metric, agg.stat, table_d}].push_back(&agg);
  }

  for (const auto& [key, aggs] : tables) {
    out << "\n## " << std::get<0>(key) << " (" << std::get<1>(key) << ")";
    if (std::get<2>(key) != 0) out << ", d = " << std::get<2>(key);
    out << "\n\n|  |";
    for (double c : columns) out << ' ' << axis_name << " = "
                                 << format_double(c) << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < columns.size(); ++i) out << "---|";
    out << '\n';

    std::map<std::pair<Eigen::Index, std::string>,
             std::map<double, const AggregateRow*>>
        by_row;
    for (const AggregateRow* agg : aggs)
      by_row[{agg->k, agg->method}][column_of(*agg)] = agg;
    for (const auto& [row_key, cells] : by_row) {
      out << "| k = " << row_key.first << " (" << row_key.second << ") |";
      for (double c : columns) {
        auto it = cells.find(c);
        if (it == cells.end()) {
          out << " |";
          continue;
        }
        const AggregateRow& agg = *it->second;
        char buf[128];
        if (agg.stat == "mean")
          std::snprintf(buf, sizeof(buf), " %.4g ± %.2g |", agg.center,
                        agg.lo);
        else if (agg.stat == "median")
          std::snprintf(buf, sizeof(buf), " %.4g (%.4g – %.4g) |", agg.center,
                        agg.lo, agg.hi);
        else
          std::snprintf(buf, sizeof(buf), " %.4g |", agg.center);
        out << buf;
      }
      out << '\n';
    }
  }
  return out.str();
}

void load_config_file(ExperimentConfig& cfg,
                      const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("load_config_file: cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto begin = s.find_first_not_of(" \t\r");
      if (begin == std::string::npos) return std::string();
      const auto end = s.find_last_not_of(" \t\r");
      return s.substr(begin, end - begin + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("load_config_file: expected key = value at " +
                               path.string() + ":" + std::to_string(line_no));
    apply_config_entry(cfg, trim(line.substr(0, eq)),
                       trim(line.substr(eq + 1)));
  }
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  ExperimentConfig cfg;
  load_config_file(cfg, path);
  return cfg;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  auto parse_doubles = [&](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string token;
    while (std::getline(ss, token, ',')) out.push_back(std::stod(token));
    if (out.empty()) throw std::invalid_argument("empty list for " + key);
    return out;
  };
  auto parse_indices = [&](const std::string& s) {
    std::vector<Eigen::Index> out;
    for (double v : parse_doubles(s))
      out.push_back(static_cast<Eigen::Index>(v));
    return out;
  };

  if (key == "experiment") cfg.experiment = value;
  else if (key == "d_list") cfg.d_list = parse_indices(value);
  else if (key == "k_list") cfg.k_list = parse_indices(value);
  else if (key == "p_list") cfg.p_list = parse_doubles(value);
  else if (key == "scale_list") cfg.scale_list = parse_doubles(value);
  else if (key == "trials") cfg.trials = std::stoi(value);
  else if (key == "repetitions") cfg.repetitions = std::stoi(value);
  else if (key == "ridge_lambda" || key == "lambda")
    cfg.ridge_lambda = std::stod(value);
  else if (key == "seed") cfg.seed = std::stoull(value);
  else if (key == "n_multiplier") cfg.n_multiplier = std::stoi(value);
  else if (key == "w_star") cfg.w_star = std::stod(value);
  else if (key == "noise_sigma2") cfg.noise_sigma2 = std::stod(value);
  else if (key == "workers") cfg.workers = std::stoi(value);
  else if (key == "max_hat_rows") cfg.max_hat_rows = std::stoll(value);
  else if (key == "out") cfg.output_path = value;
  else if (key == "format") cfg.format = value;
  else
    throw std::invalid_argument("unknown config key '" + key + "'");
}

std::string library_version() { return kVersion; }

}  // namespace unlearn
