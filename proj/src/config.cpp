#include "augsens/config.hpp"

#include <json.hpp>

#include <fstream>

#include "augsens/errors.hpp"
#include "augsens/json_io.hpp"

namespace augsens {
namespace {

using nlohmann::json;

Config config_from_json(const json& j) {
  Config cfg;
  try {
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      cfg.train_images = d.value("train_images", std::string{});
      cfg.train_labels = d.value("train_labels", std::string{});
      cfg.test_images = d.value("test_images", std::string{});
      cfg.test_labels = d.value("test_labels", std::string{});
    }
    cfg.subsample_train = j.value("subsample_train", cfg.subsample_train);
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      if (g.contains("classifiers")) {
        cfg.classifiers = g.at("classifiers").get<std::vector<std::string>>();
      }
      if (g.contains("hyperparams")) {
        cfg.hyperparams = g.at("hyperparams").get<std::vector<HyperParams>>();
      }
      cfg.vector_count = g.value("vector_count", cfg.vector_count);
      cfg.seed = g.value("seed", cfg.seed);
    }
    if (j.contains("augmentation")) {
      // Partial override: start from defaults, replace listed fields.
      json merged = json(cfg.augmentation);
      merged.merge_patch(j.at("augmentation"));
      cfg.augmentation = merged.get<AugmentationParams>();
    }
    cfg.workers = j.value("workers", cfg.workers);
    cfg.save_models = j.value("save_models", cfg.save_models);
    cfg.models_dir = j.value("models_dir", std::string{});
    cfg.metric = j.value("metric", cfg.metric);
    if (j.contains("reliability_mode")) {
      cfg.reliability_mode =
          reliability_mode_from_name(j.at("reliability_mode").get<std::string>());
    }
    cfg.sensitivity_threshold =
        j.value("sensitivity_threshold", cfg.sensitivity_threshold);
    cfg.top_n = j.value("top_n", cfg.top_n);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

void apply_overrides(json& j, const std::vector<std::string>& overrides) {
  for (const std::string& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("override must be key.path=value: " + entry);
    }
    std::string pointer = "/" + entry.substr(0, eq);
    for (auto& c : pointer) {
      if (c == '.') c = '/';
    }
    const std::string raw = entry.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // plain string
    }
    try {
      j[json::json_pointer(pointer)] = value;
    } catch (const json::exception& e) {
      throw ConfigError("bad override '" + entry + "': " + e.what());
    }
  }
}

}  // namespace

void Config::validate() const {
  if (classifiers.empty()) throw ConfigError("no classifiers configured");
  for (const std::string& id : classifiers) {
    try {
      make_classifier(id);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (hyperparams.empty()) throw ConfigError("no hyper-params configured");
  for (const HyperParams& hp : hyperparams) {
    try {
      hp.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (vector_count < 1) throw ConfigError("vector_count must be >= 1");
  if (metric != "accuracy" && metric != "loss") {
    throw ConfigError("metric must be 'accuracy' or 'loss'");
  }
  if (!(sensitivity_threshold > 0.0)) {
    throw ConfigError("sensitivity_threshold must be positive");
  }
  if (top_n < 1) throw ConfigError("top_n must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  try {
    augmentation.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

Config load_config(const std::filesystem::path& path,
                   const std::vector<std::string>& overrides) {
  json j = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  apply_overrides(j, overrides);
  return config_from_json(j);
}

Config config_from_overrides(const std::vector<std::string>& overrides) {
  return load_config({}, overrides);
}

}  // namespace augsens
