#include "augsens/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "augsens/errors.hpp"
#include "augsens/json_io.hpp"

namespace augsens {

void to_json(nlohmann::json& j, const RunRecord& r) {
  j = nlohmann::json{{"classifier", r.classifier_id},
                     {"hyperparams", r.hp},
                     {"vector", r.vector},
                     {"seed", r.seed},
                     {"test_accuracy", r.test_accuracy},
                     {"test_loss", r.test_loss},
                     {"test_loss_x100", r.test_loss_x100},
                     {"valid_accuracy", r.valid_accuracy},
                     {"wall_seconds", r.wall_seconds},
                     {"status", r.status}};
  if (!r.error.empty()) j["error"] = r.error;
}

void from_json(const nlohmann::json& j, RunRecord& r) {
  r.classifier_id = j.at("classifier").get<std::string>();
  r.hp = j.at("hyperparams").get<HyperParams>();
  r.vector = j.at("vector").get<AugVector>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.test_accuracy = j.at("test_accuracy").get<double>();
  r.test_loss = j.at("test_loss").get<double>();
  r.test_loss_x100 = j.at("test_loss_x100").get<double>();
  r.valid_accuracy = j.at("valid_accuracy").get<double>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.status = j.at("status").get<std::string>();
  r.error = j.value("error", "");
}

namespace {

void validate_record(const RunRecord& r, const std::string& where) {
  if (r.status != "done" && r.status != "failed") {
    throw FormatError(where + ": unknown status '" + r.status + "'");
  }
  if (r.status == "done") {
    if (r.test_accuracy < 0.0 || r.test_accuracy > 100.0) {
      throw ConsistencyError(where + ": accuracy outside [0,100]");
    }
    if (r.test_loss < 0.0) {
      throw ConsistencyError(where + ": negative loss");
    }
  }
}

// Existing complete records, keyed. An unterminated final line (an append
// cut short by a crash) is dropped and truncated away so the next append
// starts on a clean line boundary.
std::unordered_map<std::string, RunRecord> resume_scan(
    const std::filesystem::path& store) {
  std::unordered_map<std::string, RunRecord> existing;
  std::ifstream in(store, std::ios::binary);
  if (!in) return existing;

  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  in.close();

  std::size_t complete_bytes = content.rfind('\n');
  complete_bytes = complete_bytes == std::string::npos ? 0 : complete_bytes + 1;

  std::size_t pos = 0;
  int line_no = 0;
  while (pos < complete_bytes) {
    const std::size_t eol = content.find('\n', pos);
    const std::string line = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    RunRecord r;
    try {
      r = nlohmann::json::parse(line).get<RunRecord>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(store.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
    existing[r.key()] = std::move(r);
  }

  if (complete_bytes < content.size()) {
    std::filesystem::resize_file(store, complete_bytes);
  }
  return existing;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string RunRecord::key() const {
  return classifier_id + "|" + hp.descriptor() + "|" + vector.to_string();
}

const RunRecord* ResultTable::find(const std::string& key) const {
  for (const RunRecord& r : records) {
    if (r.key() == key) return &r;
  }
  return nullptr;
}

ResultTable execute(const std::vector<PlannedRun>& plan,
                    const std::filesystem::path& store, const DataSplit& data,
                    const AugmentationParams& aug,
                    const ExecuteOptions& options) {
  if (plan.empty()) {
    throw std::invalid_argument("plan must be nonempty");
  }

  auto existing = resume_scan(store);

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const PlannedRun& run = plan[i];
    const std::string key =
        run.classifier_id + "|" + run.hp.descriptor() + "|" + run.vector.to_string();
    if (!existing.contains(key)) pending.push_back(i);
  }

  std::ofstream appender(store, std::ios::app);
  if (!appender) {
    throw IoError("cannot open results store " + store.string());
  }

  std::mutex store_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<std::size_t> failed{0};
  std::atomic<bool> store_broken{false};
  const std::size_t total = pending.size();

  auto worker = [&]() {
    while (true) {
      if (store_broken.load()) return;
      if (options.should_stop && options.should_stop()) return;
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      const PlannedRun& run = plan[pending[slot]];

      RunRecord record;
      record.classifier_id = run.classifier_id;
      record.hp = run.hp;
      record.vector = run.vector;
      record.seed = run.seed;

      const auto started = std::chrono::steady_clock::now();
      try {
        TrainedModel trained =
            train({run.classifier_id}, data, run.vector, aug, run.hp, run.seed);
        const EvalResult test = evaluate(*trained.classifier, data.test);
        record.test_accuracy = test.accuracy;
        record.test_loss = test.loss;
        record.test_loss_x100 = test.loss_x100;
        record.valid_accuracy =
            trained.curve.valid_accuracy.empty()
                ? 0.0
                : trained.curve.valid_accuracy.back();
        record.status = "done";
        if (options.save_models && !options.models_dir.empty()) {
          std::filesystem::create_directories(options.models_dir);
          const auto name = run.classifier_id + "_" + run.hp.descriptor() + "_" +
                            run.vector.to_string() + ".bin";
          save_model(options.models_dir / name, *trained.classifier, run.hp,
                     run.seed);
        }
      } catch (const std::exception& e) {
        record.status = "failed";
        record.error = e.what();
        failed.fetch_add(1);
      }
      record.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
              .count();

      {
        std::lock_guard<std::mutex> lock(store_mutex);
        appender << nlohmann::json(record).dump() << "\n";
        appender.flush();
        if (!appender) {
          store_broken.store(true);
          return;
        }
        existing[record.key()] = record;
        const std::size_t finished = done.fetch_add(1) + 1;
        if (options.on_complete) options.on_complete(record, finished, total);
      }
    }
  };

  const int n_workers =
      std::max(1, std::min<int>(options.workers, static_cast<int>(pending.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  if (store_broken.load()) {
    throw IoError("write to results store failed: " + store.string());
  }

  if (options.stats) {
    options.stats->executed = done.load();
    options.stats->skipped = plan.size() - pending.size();
    options.stats->failed = failed.load();
  }

  ResultTable table;
  table.records.reserve(plan.size());
  for (const PlannedRun& run : plan) {
    const std::string key =
        run.classifier_id + "|" + run.hp.descriptor() + "|" + run.vector.to_string();
    const auto it = existing.find(key);
    if (it != existing.end()) table.records.push_back(it->second);
  }
  return table;
}

ResultTable load_results(const std::filesystem::path& store) {
  std::ifstream in(store);
  if (!in) throw IoError("cannot open results store " + store.string());

  ResultTable table;
  std::unordered_set<std::string> keys;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = store.string() + ":" + std::to_string(line_no);
    RunRecord r;
    try {
      r = nlohmann::json::parse(line).get<RunRecord>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
    validate_record(r, where);
    if (!keys.insert(r.key()).second) {
      throw ConsistencyError(where + ": duplicate run " + r.key());
    }
    table.records.push_back(std::move(r));
  }
  return table;
}

void write_results_csv(const std::filesystem::path& path,
                       const ResultTable& table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "classifier,optimizer,epochs,learning_rate,batch_size,vector,seed,"
         "test_accuracy,test_loss,test_loss_x100,valid_accuracy,wall_seconds,"
         "status,error\n";
  for (const RunRecord& r : table.records) {
    out << r.classifier_id << "," << optimizer_name(r.hp.optimizer) << ","
        << r.hp.epochs << "," << format_double(r.hp.learning_rate) << ","
        << r.hp.batch_size << "," << r.vector.to_string() << "," << r.seed << ","
        << format_double(r.test_accuracy) << "," << format_double(r.test_loss)
        << "," << format_double(r.test_loss_x100) << ","
        << format_double(r.valid_accuracy) << ","
        << format_double(r.wall_seconds) << "," << r.status << "," << r.error
        << "\n";
  }
}

}  // namespace augsens
