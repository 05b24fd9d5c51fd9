#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "augsens/commands.hpp"
#include "augsens/errors.hpp"

using namespace augsens;

int main(int argc, char** argv) {
  CLI::App app{"augmentation sensitivity pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string plan_path = "plan.json";
  std::string store_path = "results.jsonl";
  std::string out_dir = "analysis";
  std::string metric;
  std::string reliability_mode;
  double sensitivity_threshold = -1.0;
  int top_n = -1;
  int workers = -1;
  std::int64_t seed = -1;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", overrides,
                 "config override, key.path=value (repeatable)");

  auto* design = app.add_subcommand("design", "enumerate the experiment grid");
  design->add_option("--plan", plan_path, "plan file to write");
  design->add_option("--seed", seed, "grid seed");

  auto* run = app.add_subcommand("run", "execute the plan");
  run->add_option("--plan", plan_path, "plan file");
  run->add_option("--store", store_path, "results store (JSON lines)");
  run->add_option("--workers", workers, "concurrent training runs");

  auto* analyze = app.add_subcommand("analyze", "fit surrogates and metrics");
  analyze->add_option("--plan", plan_path, "plan file");
  analyze->add_option("--store", store_path, "results store");
  analyze->add_option("--out", out_dir, "analysis output directory");
  analyze->add_option("--metric", metric, "accuracy|loss");
  analyze->add_option("--reliability-mode", reliability_mode, "table|equation");
  analyze->add_option("--sensitivity-threshold", sensitivity_threshold,
                      "sensitive when sensitivity >= threshold");
  analyze->add_option("--top-n", top_n, "reliable set size");

  auto* report = app.add_subcommand("report", "write report.md and plot data");
  report->add_option("--out", out_dir, "analysis directory to read and write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Config config = load_config(config_path, overrides);
    if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
    if (workers > 0) config.workers = workers;
    if (!metric.empty()) config.metric = metric;
    if (!reliability_mode.empty()) {
      try {
        config.reliability_mode = reliability_mode_from_name(reliability_mode);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (sensitivity_threshold >= 0.0) {
      config.sensitivity_threshold = sensitivity_threshold;
    }
    if (top_n > 0) config.top_n = top_n;

    if (design->parsed()) {
      return cmd_design(config, plan_path, std::cout);
    }
    if (run->parsed()) {
      return cmd_run(config, plan_path, store_path, std::cout);
    }
    if (analyze->parsed()) {
      return cmd_analyze(config, plan_path, store_path, out_dir, std::cout);
    }
    return cmd_report(out_dir, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
