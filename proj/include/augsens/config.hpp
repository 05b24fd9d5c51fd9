#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "augsens/augment.hpp"
#include "augsens/design.hpp"
#include "augsens/metrics.hpp"
#include "augsens/model.hpp"

namespace augsens {

// Pipeline configuration. Every field has a default; a JSON config file and
// key.path=value overrides refine it. Path resolution and range checks run
// at command start and raise ConfigError.
struct Config {
  // dataset
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
  std::size_t subsample_train = 0;  // 0 = full scale

  // grid
  std::vector<std::string> classifiers = {"linear-softmax", "mlp"};
  std::vector<HyperParams> hyperparams = default_hyperparams();
  int vector_count = 28;
  std::uint64_t seed = 42;

  AugmentationParams augmentation;

  // execution
  int workers = 4;
  bool save_models = false;
  std::filesystem::path models_dir;

  // analysis
  std::string metric = "accuracy";
  ReliabilityMode reliability_mode = ReliabilityMode::kTable;
  double sensitivity_threshold = 0.2;
  int top_n = 3;

  // Checks grid and threshold ranges (dataset paths are checked by the
  // commands that need them).
  void validate() const;
};

// Reads the config file (optional) and applies "key.path=value" overrides.
// Values parse as JSON scalars, falling back to strings.
Config load_config(const std::filesystem::path& path,
                   const std::vector<std::string>& overrides = {});

Config config_from_overrides(const std::vector<std::string>& overrides);

}  // namespace augsens
