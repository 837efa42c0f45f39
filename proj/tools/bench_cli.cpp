// Benchmark harness for approximate-deletion methods on ridge linear and
// logistic models. Subcommands mirror the experiment families: runtime, l2,
// fit, logistic-l2, logistic-fit.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "unlearn/bench.hpp"

namespace {

void add_common_options(CLI::App* sub, unlearn::ExperimentConfig& cfg,
                        std::string& config_path) {
  sub->add_option("--config", config_path,
                  "Config file with key = value lines; flags override it");
  sub->add_option("--d-list", cfg.d_list, "Feature dimensions")
      ->delimiter(',');
  sub->add_option("--k-list", cfg.k_list, "Deletion batch sizes")
      ->delimiter(',');
  sub->add_option("--p-list", cfg.p_list, "Sparsity fractions")
      ->delimiter(',');
  sub->add_option("--scale-list", cfg.scale_list, "Outlier scales")
      ->delimiter(',');
  sub->add_option("--trials", cfg.trials, "Trials per grid cell");
  sub->add_option("--repetitions", cfg.repetitions,
                  "Timing repetitions per cell");
  sub->add_option("--lambda", cfg.ridge_lambda, "Ridge strength");
  sub->add_option("--seed", cfg.seed, "Base seed");
  sub->add_option("--n-mult", cfg.n_multiplier, "n as a multiple of d");
  sub->add_option("--w-star", cfg.w_star, "Injected feature weight");
  sub->add_option("--noise", cfg.noise_sigma2, "Noise variance");
  sub->add_option("--workers", cfg.workers, "Worker threads for trials");
  sub->add_option("--max-hat-rows", cfg.max_hat_rows,
                  "Dense hat matrix row budget");
  sub->add_option("--out", cfg.output_path, "Output path (default stdout)");
  sub->add_option("--format", cfg.format, "Output format: csv, json or md")
      ->check(CLI::IsMember({"csv", "json", "md"}));
}

int run(const unlearn::ExperimentConfig& cfg) {
  const unlearn::ExperimentReport report = unlearn::run_experiment(cfg);

  std::string payload;
  if (cfg.format == "csv")
    payload = unlearn::rows_to_csv(report);
  else if (cfg.format == "json")
    payload = unlearn::report_to_json(report);
  else
    payload = unlearn::report_to_markdown(report);

  if (cfg.output_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream out(cfg.output_path);
    if (!out) {
      std::cerr << "error: cannot open output path " << cfg.output_path
                << "\n";
      return 1;
    }
    out << payload;
    if (!out) {
      std::cerr << "error: write failed for " << cfg.output_path << "\n";
      return 1;
    }
    std::cerr << "wrote " << report.rows.size() << " rows to "
              << cfg.output_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate-deletion benchmark harness"};
  app.require_subcommand(1);

  struct SubState {
    unlearn::ExperimentConfig cfg;
    std::string config_path;
  };

  const struct {
    const char* name;
    const char* help;
    int default_trials;
  } kExperiments[] = {
      {"runtime", "Online runtime scaling per method", 10},
      {"l2", "Parameter distance under outlier scaling", 10},
      {"fit", "Feature injection test for linear models", 10},
      {"logistic-l2", "Parameter distance for logistic models", 5},
      {"logistic-fit", "Feature injection test for logistic models", 5},
  };

  std::vector<std::unique_ptr<SubState>> states;
  for (const auto& exp : kExperiments) {
    auto state = std::make_unique<SubState>();
    state->cfg.experiment = exp.name;
    state->cfg.trials = exp.default_trials;
    CLI::App* sub = app.add_subcommand(exp.name, exp.help);
    add_common_options(sub, state->cfg, state->config_path);
    states.push_back(std::move(state));
  }

  // First pass: load --config for the chosen subcommand so file values sit
  // between defaults and explicit flags. The subcommand name always wins for
  // the experiment field.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) != "--config") continue;
    for (std::size_t s = 0; s < states.size(); ++s) {
      if (argc > 1 && std::string(argv[1]) == kExperiments[s].name) {
        try {
          unlearn::load_config_file(states[s]->cfg, argv[i + 1]);
          states[s]->cfg.experiment = kExperiments[s].name;
        } catch (const std::exception& e) {
          std::cerr << "error: " << e.what() << "\n";
          return 1;
        }
      }
    }
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t s = 0; s < states.size(); ++s) {
      if (app.get_subcommands().front()->get_name() == kExperiments[s].name)
        return run(states[s]->cfg);
    }
    std::cerr << "error: no experiment selected\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
