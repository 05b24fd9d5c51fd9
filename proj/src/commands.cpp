#include "augsens/commands.hpp"

#include <json.hpp>

#include <fstream>
#include <ostream>
#include <unordered_map>

#include "augsens/errors.hpp"
#include "augsens/idx.hpp"
#include "augsens/json_io.hpp"
#include "augsens/runner.hpp"
#include "augsens/surrogate.hpp"

namespace augsens {
namespace {

template <typename Body>
int guard(std::ostream& out, Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
}

void require_file(const std::filesystem::path& path, const std::string& what) {
  if (path.empty()) {
    throw ConfigError(what + " not configured");
  }
  if (!std::filesystem::exists(path)) {
    throw ConfigError(what + " not found: " + path.string());
  }
}

std::string run_key(const PlannedRun& run) {
  return run.classifier_id + "|" + run.hp.descriptor() + "|" +
         run.vector.to_string();
}

}  // namespace

int cmd_design(const Config& config, const std::filesystem::path& plan_path,
               std::ostream& out) {
  return guard(out, [&]() {
    config.validate();

    Plan plan;
    plan.grid.seed_base = config.seed;
    for (const std::string& id : config.classifiers) {
      plan.grid.classifiers.push_back({id});
    }
    plan.grid.hyperparams = config.hyperparams;
    plan.grid.vectors = generate_vectors(config.vector_count, config.seed);
    plan.augmentation = config.augmentation;
    plan.runs = enumerate_runs(plan.grid);

    save_plan(plan_path, plan);
    out << plan.grid.classifiers.size() << " x " << plan.grid.hyperparams.size()
        << " x " << plan.grid.vectors.size() << " = " << plan.runs.size()
        << " runs\n";
    out << "plan written to " << plan_path.string() << "\n";
    return 0;
  });
}

int cmd_run(const Config& config, const std::filesystem::path& plan_path,
            const std::filesystem::path& store_path, std::ostream& out) {
  return guard(out, [&]() {
    config.validate();
    require_file(config.train_images, "dataset.train_images");
    require_file(config.train_labels, "dataset.train_labels");
    require_file(config.test_images, "dataset.test_images");
    require_file(config.test_labels, "dataset.test_labels");
    require_file(plan_path, "plan");

    const Plan plan = load_plan(plan_path);

    ImageList train_pool = load_idx(config.train_images, config.train_labels);
    ImageList test = load_idx(config.test_images, config.test_labels);
    DataSplit data =
        split(std::move(train_pool), std::move(test),
              StableHash().add(config.seed).add("split").value());
    if (config.subsample_train > 0) {
      data = subsample(data, config.subsample_train,
                       StableHash().add(config.seed).add("subsample").value());
    }
    out << "dataset: " << data.train.size() << " train, " << data.valid.size()
        << " valid, " << data.test.size() << " test\n";

    ExecuteStats stats;
    ExecuteOptions options;
    options.workers = config.workers;
    options.save_models = config.save_models;
    options.models_dir = config.models_dir;
    options.stats = &stats;
    options.on_complete = [&](const RunRecord& r, std::size_t done,
                              std::size_t total) {
      out << "[" << done << "/" << total << "] " << r.classifier_id << " "
          << r.hp.descriptor() << " " << r.vector.to_string();
      if (r.status == "done") {
        out << " acc " << r.test_accuracy;
      } else {
        out << " FAILED (" << r.error << ")";
      }
      out << " (" << r.wall_seconds << "s)\n";
    };

    execute(plan.runs, store_path, data, plan.augmentation, options);
    out << stats.executed << " executed, " << stats.skipped << " skipped, "
        << stats.failed << " failed\n";
    return stats.failed == 0 ? 0 : 1;
  });
}

int cmd_analyze(const Config& config, const std::filesystem::path& plan_path,
                const std::filesystem::path& store_path,
                const std::filesystem::path& out_dir, std::ostream& out) {
  return guard(out, [&]() {
    config.validate();
    require_file(plan_path, "plan");

    const Plan plan = load_plan(plan_path);
    const ResultTable table = load_results(store_path);

    std::unordered_map<std::string, const RunRecord*> by_key;
    for (const RunRecord& r : table.records) by_key[r.key()] = &r;

    std::vector<std::string> missing;
    for (const PlannedRun& run : plan.runs) {
      const auto it = by_key.find(run_key(run));
      if (it == by_key.end() || it->second->status != "done") {
        missing.push_back(run_key(run));
      }
    }
    if (!missing.empty()) {
      out << "incomplete store: " << missing.size() << " missing cells\n";
      for (std::size_t i = 0; i < std::min<std::size_t>(missing.size(), 20); ++i) {
        out << "  " << missing[i] << "\n";
      }
      return 1;
    }

    const auto n_vectors = static_cast<Eigen::Index>(plan.grid.vectors.size());
    Eigen::MatrixXd X(n_vectors, kNumAugmentations);
    for (Eigen::Index i = 0; i < n_vectors; ++i) {
      for (int j = 0; j < kNumAugmentations; ++j) {
        X(i, j) = plan.grid.vectors[static_cast<std::size_t>(i)].bits[j] ? 1.0 : 0.0;
      }
    }

    std::vector<SurrogateFit> fits;
    for (const ClassifierSpec& spec : plan.grid.classifiers) {
      for (std::size_t l = 0; l < plan.grid.hyperparams.size(); ++l) {
        const HyperParams& hp = plan.grid.hyperparams[l];
        Eigen::VectorXd y_acc(n_vectors);
        Eigen::VectorXd y_loss(n_vectors);
        for (Eigen::Index i = 0; i < n_vectors; ++i) {
          PlannedRun probe;
          probe.classifier_id = spec.id;
          probe.hp = hp;
          probe.vector = plan.grid.vectors[static_cast<std::size_t>(i)];
          const RunRecord* r = by_key.at(run_key(probe));
          y_acc(i) = r->test_accuracy;
          y_loss(i) = r->test_loss;
        }
        for (const auto& [metric, y] :
             {std::pair{"accuracy", &y_acc}, std::pair{"loss", &y_loss}}) {
          SurrogateFit fit = fit_ols(X, *y);
          fit.metric = metric;
          fit.classifier_id = spec.id;
          fit.hp_descriptor = hp.descriptor();
          fits.push_back(std::move(fit));
        }
      }
    }

    std::filesystem::create_directories(out_dir);
    export_fits_csv(out_dir / "fits.csv", fits);

    const CoefficientTensor tensor_acc = build_tensor(fits, "accuracy");
    const CoefficientTensor tensor_loss = build_tensor(fits, "loss");
    export_tensor_csv(out_dir / "tensor_accuracy.csv", tensor_acc);
    export_tensor_csv(out_dir / "tensor_loss.csv", tensor_loss);

    {
      std::ofstream icsv(out_dir / "intercepts.csv", std::ios::trunc);
      if (!icsv) throw IoError("cannot write intercepts.csv");
      icsv << "classifier,metric";
      for (const std::string& hp : tensor_acc.hp_descriptors) icsv << "," << hp;
      icsv << "\n";
      for (const ClassifierSpec& spec : plan.grid.classifiers) {
        for (const std::string metric : {"accuracy", "loss"}) {
          icsv << spec.id << "," << metric;
          for (const HyperParams& hp : plan.grid.hyperparams) {
            for (const SurrogateFit& fit : fits) {
              if (fit.classifier_id == spec.id && fit.metric == metric &&
                  fit.hp_descriptor == hp.descriptor()) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), "%.10g", fit.intercept);
                icsv << "," << buf;
              }
            }
          }
          icsv << "\n";
        }
      }
    }

    const CoefficientTensor& tensor =
        config.metric == "accuracy" ? tensor_acc : tensor_loss;
    std::vector<MetricsRow> rows = compute_metrics(tensor);
    classify(rows, config.sensitivity_threshold, config.top_n,
             config.reliability_mode);
    export_metrics_csv(out_dir / "metrics.csv", rows, tensor.classifier_ids);

    nlohmann::json meta{
        {"metric", config.metric},
        {"reliability_mode", reliability_mode_name(config.reliability_mode)},
        {"sensitivity_threshold", config.sensitivity_threshold},
        {"top_n", config.top_n},
        {"classifiers", tensor.classifier_ids},
        {"hp_descriptors", tensor.hp_descriptors}};
    std::ofstream meta_out(out_dir / "analysis.json", std::ios::trunc);
    if (!meta_out) throw IoError("cannot write analysis.json");
    meta_out << meta.dump(2) << "\n";

    out << "analysis written to " << out_dir.string() << "\n";
    return 0;
  });
}

}  // namespace augsens
