#pragma once

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "augsens/augment.hpp"
#include "augsens/dataset.hpp"
#include "augsens/design.hpp"
#include "augsens/model.hpp"

namespace augsens {

// One trained model's outcome. (classifier, hyper-params, vector) is the
// unique key within a store.
struct RunRecord {
  std::string classifier_id;
  HyperParams hp;
  AugVector vector;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;   // percent
  double test_loss = 0.0;       // raw mean cross-entropy
  double test_loss_x100 = 0.0;
  double valid_accuracy = 0.0;  // percent
  double wall_seconds = 0.0;
  std::string status;           // "done" | "failed"
  std::string error;            // set when failed

  std::string key() const;
};

void to_json(nlohmann::json& j, const RunRecord& r);
void from_json(const nlohmann::json& j, RunRecord& r);

struct ResultTable {
  std::vector<RunRecord> records;

  const RunRecord* find(const std::string& key) const;
};

struct ExecuteStats {
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

struct ExecuteOptions {
  int workers = 1;
  // Invoked after each completed run (under the store lock).
  std::function<void(const RunRecord&, std::size_t done, std::size_t total)>
      on_complete;
  // Polled between runs; returning true stops dispatch of further runs.
  std::function<bool()> should_stop;
  bool save_models = false;
  std::filesystem::path models_dir;
  ExecuteStats* stats = nullptr;
};

// Executes every plan entry that is not already present in the store,
// appending one JSON record per line as runs finish. Previously completed
// triples are skipped; per-run failures are recorded with status "failed"
// and do not abort the batch. Returns the table in plan order.
ResultTable execute(const std::vector<PlannedRun>& plan,
                    const std::filesystem::path& store, const DataSplit& data,
                    const AugmentationParams& aug,
                    const ExecuteOptions& options = {});

// Strict parse of a results store. Malformed lines raise FormatError with
// the line number; duplicate keys raise ConsistencyError naming the triple.
ResultTable load_results(const std::filesystem::path& store);

// Same columns as the JSONL records.
void write_results_csv(const std::filesystem::path& path,
                       const ResultTable& table);

}  // namespace augsens
