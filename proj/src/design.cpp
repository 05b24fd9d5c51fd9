#include "augsens/design.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>

#include "augsens/errors.hpp"
#include "augsens/json_io.hpp"
#include "augsens/rng.hpp"

namespace augsens {

std::vector<AugVector> generate_vectors(int n, std::uint64_t seed) {
  constexpr int kMaxVectors = (1 << kNumAugmentations) - 1;  // non-zero masks
  if (n < 0 || n > kMaxVectors) {
    throw std::invalid_argument("vector count must be in [0, 511]");
  }
  Rng rng(seed);
  std::set<AugVector> seen;
  std::vector<AugVector> out;
  out.reserve(static_cast<std::size_t>(n));
  while (static_cast<int>(out.size()) < n) {
    AugVector v;
    for (int i = 0; i < kNumAugmentations; ++i) {
      v.bits[i] = rng.uniform() < 0.5;
    }
    if (!v.any() || !seen.insert(v).second) continue;
    out.push_back(v);
  }
  return out;
}

std::vector<HyperParams> default_hyperparams() {
  return {
      {OptimizerKind::kSgd, 20, 0.01, 64},
      {OptimizerKind::kSgd, 15, 0.01, 64},
      {OptimizerKind::kAdam, 20, 0.001, 64},
      {OptimizerKind::kAdam, 15, 0.001, 64},
  };
}

std::uint64_t run_seed(std::uint64_t seed_base, const std::string& classifier_id,
                       int hp_index, const AugVector& vector) {
  return StableHash()
      .add(seed_base)
      .add(classifier_id)
      .add(static_cast<std::uint64_t>(hp_index))
      .add(vector.to_string())
      .value();
}

std::vector<PlannedRun> enumerate_runs(const ExperimentGrid& grid) {
  std::vector<PlannedRun> runs;
  runs.reserve(grid.classifiers.size() * grid.hyperparams.size() *
               grid.vectors.size());
  for (const ClassifierSpec& spec : grid.classifiers) {
    for (std::size_t h = 0; h < grid.hyperparams.size(); ++h) {
      for (const AugVector& v : grid.vectors) {
        PlannedRun run;
        run.classifier_id = spec.id;
        run.hp_index = static_cast<int>(h);
        run.hp = grid.hyperparams[h];
        run.vector = v;
        run.seed = run_seed(grid.seed_base, spec.id, run.hp_index, v);
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

void save_plan(const std::filesystem::path& path, const Plan& plan) {
  nlohmann::json j;
  j["seed_base"] = plan.grid.seed_base;
  j["augmentation"] = plan.augmentation;
  for (const ClassifierSpec& c : plan.grid.classifiers) {
    j["classifiers"].push_back(c.id);
  }
  j["hyperparams"] = plan.grid.hyperparams;
  j["vectors"] = plan.grid.vectors;
  for (const PlannedRun& run : plan.runs) {
    j["runs"].push_back({{"classifier", run.classifier_id},
                         {"hp_index", run.hp_index},
                         {"vector", run.vector},
                         {"seed", run.seed}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

Plan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }

  Plan plan;
  try {
    plan.grid.seed_base = j.at("seed_base").get<std::uint64_t>();
    plan.augmentation = j.at("augmentation").get<AugmentationParams>();
    for (const auto& id : j.at("classifiers")) {
      plan.grid.classifiers.push_back({id.get<std::string>()});
    }
    plan.grid.hyperparams = j.at("hyperparams").get<std::vector<HyperParams>>();
    plan.grid.vectors = j.at("vectors").get<std::vector<AugVector>>();
    for (const auto& r : j.at("runs")) {
      PlannedRun run;
      run.classifier_id = r.at("classifier").get<std::string>();
      run.hp_index = r.at("hp_index").get<int>();
      if (run.hp_index < 0 ||
          run.hp_index >= static_cast<int>(plan.grid.hyperparams.size())) {
        throw ConsistencyError("run hp_index out of range in " + path.string());
      }
      run.hp = plan.grid.hyperparams[static_cast<std::size_t>(run.hp_index)];
      run.vector = r.at("vector").get<AugVector>();
      run.seed = r.at("seed").get<std::uint64_t>();
      plan.runs.push_back(std::move(run));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return plan;
}

}  // namespace augsens
