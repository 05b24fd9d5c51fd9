#include <doctest.h>

#include <fstream>
#include <sstream>

#include "augsens/commands.hpp"
#include "augsens/csv.hpp"
#include "augsens/idx.hpp"
#include "augsens/synthetic.hpp"
#include "golden.hpp"
#include "test_support.hpp"

using namespace augsens;
using testsup::TempDir;
using testsup::read_file;

namespace {

// Small real pipeline: 1 classifier x 2 settings x 5 vectors on synthetic data.
struct SmallPipeline {
  TempDir dir;
  Config config;
  std::filesystem::path plan = dir / "plan.json";
  std::filesystem::path store = dir / "results.jsonl";
  std::filesystem::path analysis = dir / "analysis";

  SmallPipeline() {
    save_idx(dir / "train-img", dir / "train-lab", make_synthetic_images(400, 5));
    save_idx(dir / "test-img", dir / "test-lab", make_synthetic_images(80, 6));
    config.train_images = dir / "train-img";
    config.train_labels = dir / "train-lab";
    config.test_images = dir / "test-img";
    config.test_labels = dir / "test-lab";
    config.classifiers = {"linear-softmax"};
    config.hyperparams = {{OptimizerKind::kSgd, 2, 0.05, 32},
                          {OptimizerKind::kAdam, 2, 0.002, 32}};
    config.vector_count = 5;
    config.seed = 77;
    config.workers = 2;
  }
};

int count_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("design writes a plan that reloads to an identical grid") {
  SmallPipeline p;
  std::ostringstream out;
  CHECK(cmd_design(p.config, p.plan, out) == 0);
  CHECK(out.str().find("1 x 2 x 5 = 10 runs") != std::string::npos);

  const Plan loaded = load_plan(p.plan);
  CHECK(loaded.grid.seed_base == 77);
  CHECK(loaded.grid.classifiers.size() == 1);
  CHECK(loaded.grid.hyperparams.size() == 2);
  CHECK(loaded.grid.vectors == generate_vectors(5, 77));
  CHECK(loaded.runs.size() == 10);

  // plan file is stable: writing the same grid twice is byte-identical
  const std::string first = read_file(p.plan);
  std::ostringstream out2;
  CHECK(cmd_design(p.config, p.plan, out2) == 0);
  CHECK(read_file(p.plan) == first);
}

TEST_CASE("design validates the config") {
  SmallPipeline p;
  std::ostringstream out;
  p.config.vector_count = 0;
  CHECK(cmd_design(p.config, p.plan, out) == 2);
  p.config.vector_count = 5;
  p.config.classifiers = {"resnet50"};
  CHECK(cmd_design(p.config, p.plan, out) == 2);
}

TEST_CASE("run executes the plan, resumes idempotently, reports failures") {
  SmallPipeline p;
  std::ostringstream out;
  REQUIRE(cmd_design(p.config, p.plan, out) == 0);
  REQUIRE(cmd_run(p.config, p.plan, p.store, out) == 0);
  CHECK(count_lines(p.store) == 10);
  CHECK(out.str().find("10 executed, 0 skipped, 0 failed") != std::string::npos);

  std::ostringstream rerun;
  REQUIRE(cmd_run(p.config, p.plan, p.store, rerun) == 0);
  CHECK(rerun.str().find("0 executed, 10 skipped, 0 failed") != std::string::npos);
  CHECK(count_lines(p.store) == 10);
}

TEST_CASE("run exits 2 when a dataset path is missing") {
  SmallPipeline p;
  std::ostringstream out;
  REQUIRE(cmd_design(p.config, p.plan, out) == 0);
  p.config.train_images = p.dir / "does-not-exist";
  CHECK(cmd_run(p.config, p.plan, p.store, out) == 2);

  p.config.train_images.clear();
  CHECK(cmd_run(p.config, p.plan, p.store, out) == 2);
}

TEST_CASE("run exits 2 when the plan is missing") {
  SmallPipeline p;
  std::ostringstream out;
  CHECK(cmd_run(p.config, p.dir / "missing-plan.json", p.store, out) == 2);
}

TEST_CASE("analyze emits fits, tensors, intercepts and metrics deterministically") {
  SmallPipeline p;
  std::ostringstream out;
  REQUIRE(cmd_design(p.config, p.plan, out) == 0);
  REQUIRE(cmd_run(p.config, p.plan, p.store, out) == 0);
  REQUIRE(cmd_analyze(p.config, p.plan, p.store, p.analysis, out) == 0);

  for (const char* name : {"fits.csv", "tensor_accuracy.csv", "tensor_loss.csv",
                           "intercepts.csv", "metrics.csv", "analysis.json"}) {
    CAPTURE(name);
    CHECK(std::filesystem::exists(p.analysis / name));
  }
  // 1 classifier x 2 settings x 2 metrics fits
  CHECK(count_lines(p.analysis / "fits.csv") == 5);
  CHECK(count_lines(p.analysis / "metrics.csv") == 10);

  const std::string metrics_before = read_file(p.analysis / "metrics.csv");
  const std::string fits_before = read_file(p.analysis / "fits.csv");
  REQUIRE(cmd_analyze(p.config, p.plan, p.store, p.analysis, out) == 0);
  CHECK(read_file(p.analysis / "metrics.csv") == metrics_before);
  CHECK(read_file(p.analysis / "fits.csv") == fits_before);
}

TEST_CASE("analyze exits 1 on an incomplete store and names the gap") {
  SmallPipeline p;
  std::ostringstream out;
  REQUIRE(cmd_design(p.config, p.plan, out) == 0);
  REQUIRE(cmd_run(p.config, p.plan, p.store, out) == 0);

  // drop the last record
  std::vector<std::string> lines;
  {
    std::ifstream in(p.store);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  {
    std::ofstream rewrite(p.store, std::ios::trunc);
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) rewrite << lines[i] << "\n";
  }

  std::ostringstream diag;
  CHECK(cmd_analyze(p.config, p.plan, p.store, p.analysis, diag) == 1);
  CHECK(diag.str().find("incomplete store") != std::string::npos);
  CHECK(diag.str().find("linear-softmax|") != std::string::npos);
}

TEST_CASE("analyze exits 1 when only one hyper-param setting exists") {
  SmallPipeline p;
  p.config.hyperparams = {{OptimizerKind::kSgd, 1, 0.05, 32}};
  std::ostringstream out;
  REQUIRE(cmd_design(p.config, p.plan, out) == 0);
  REQUIRE(cmd_run(p.config, p.plan, p.store, out) == 0);
  std::ostringstream diag;
  CHECK(cmd_analyze(p.config, p.plan, p.store, p.analysis, diag) == 1);
  CHECK(diag.str().find("at least 2 hyper-param") != std::string::npos);
}

TEST_CASE("analyze exits 1 when the store is missing") {
  SmallPipeline p;
  std::ostringstream out;
  REQUIRE(cmd_design(p.config, p.plan, out) == 0);
  CHECK(cmd_analyze(p.config, p.plan, p.dir / "none.jsonl", p.analysis, out) == 1);
}

TEST_CASE("report requires a populated analysis directory") {
  TempDir dir;
  std::ostringstream out;
  std::filesystem::create_directories(dir / "empty");
  CHECK(cmd_report(dir / "empty", out) == 1);
}

TEST_CASE("golden store analysis reproduces the published tables end to end") {
  TempDir dir;
  const golden::FixtureExperiment fx = golden::make_fixture_experiment();
  const auto plan_path = dir / "plan.json";
  const auto store_path = dir / "store.jsonl";
  const auto analysis = dir / "analysis";
  save_plan(plan_path, fx.plan);
  fx.write_store(store_path);

  Config config;  // defaults: accuracy metric, table mode, 0.2 / top-3
  std::ostringstream out;
  REQUIRE(cmd_analyze(config, plan_path, store_path, analysis, out) == 0);

  const auto rows = read_csv(analysis / "metrics.csv");
  REQUIRE(rows.size() == 10);
  // columns: aug_id, aug_name, var_m1, var_m2, sensitivity, consistency,
  // influence, reliability_table, reliability_equation, sensitive, reliable
  for (const auto& expected : golden::kScoreTable) {
    const auto& row = rows[static_cast<std::size_t>(expected.aug) + 1];
    CAPTURE(expected.aug);
    CHECK(std::stod(row[2]) == doctest::Approx(expected.var_m1).epsilon(1e-4));
    CHECK(std::stod(row[3]) == doctest::Approx(expected.var_m2).epsilon(1e-4));
    CHECK(std::stod(row[4]) == doctest::Approx(expected.sensitivity).epsilon(1e-4));
    CHECK(std::stod(row[6]) == doctest::Approx(expected.influence).epsilon(1e-4));
    CHECK(std::stod(row[7]) == doctest::Approx(expected.reliability).epsilon(1e-4));
  }
  CHECK(std::stod(rows[5][8]) ==
        doctest::Approx(golden::kEquationReliabilityAug4).epsilon(1e-4));

  // intercepts recovered from the synthesized store
  const auto intercepts = read_csv(analysis / "intercepts.csv");
  REQUIRE(intercepts.size() == 5);  // header + 2 classifiers x 2 metrics
  CHECK(intercepts[1][0] == "linear-softmax");
  CHECK(intercepts[1][1] == "accuracy");
  for (int l = 0; l < 4; ++l) {
    CHECK(std::stod(intercepts[1][static_cast<std::size_t>(l) + 2]) ==
          doctest::Approx(golden::kAccuracyIntercepts[0][static_cast<std::size_t>(l)])
              .epsilon(1e-9));
  }

  std::ostringstream rep_out;
  REQUIRE(cmd_report(analysis, rep_out) == 0);
  const std::string report = read_file(analysis / "report.md");

  // threshold rule: only Transpose and Equalize fall below 0.2
  CHECK(report.find("Non-sensitive: Transpose (0), Equalize (3)") !=
        std::string::npos);
  // ranking: bottom three are Transpose, Equalize, ShiftScaleRotate
  CHECK(report.find("Least sensitive (bottom 3 by sensitivity): Transpose (0), "
                    "Equalize (3), ShiftScaleRotate (7)") != std::string::npos);
  // ranking: top three are GaussNoise, RandomRotate90, InvertImg
  CHECK(report.find("Most sensitive (top 3 by sensitivity): GaussNoise (4), "
                    "RandomRotate90 (8), InvertImg (6)") != std::string::npos);
  // top-3 positive reliability, table mode
  CHECK(report.find("GaussianBlur (5), GaussNoise (4), RandomRotate90 (8)") !=
        std::string::npos);
  // both reliability conventions appear
  CHECK(report.find("reliability (table)") != std::string::npos);
  CHECK(report.find("reliability (equation)") != std::string::npos);
  CHECK(report.find("0.521006") != std::string::npos);
  CHECK(report.find("0.618641") != std::string::npos);

  // per-classifier series files: 9 rows + header, 4 hyper-param columns
  const auto series =
      read_csv(analysis / "coefficients_linear-softmax_accuracy.csv");
  REQUIRE(series.size() == 10);
  REQUIRE(series[0].size() == 6);
  for (int i = 0; i < 9; ++i) {
    for (int l = 0; l < 4; ++l) {
      CHECK(std::stod(series[static_cast<std::size_t>(i) + 1]
                            [static_cast<std::size_t>(l) + 2]) ==
            doctest::Approx(golden::kAccuracySeries[0][static_cast<std::size_t>(l)]
                                                   [static_cast<std::size_t>(i)])
                .epsilon(1e-3));
    }
  }
  CHECK(std::filesystem::exists(analysis / "intercept_series.csv"));
}

TEST_CASE("config loading applies file values and overrides") {
  TempDir dir;
  const auto path = dir / "config.json";
  {
    std::ofstream out(path);
    out << R"({"grid": {"vector_count": 12, "seed": 5},
               "metric": "loss",
               "augmentation": {"shift_limit": 0.2},
               "sensitivity_threshold": 0.3})";
  }
  const Config cfg = load_config(path, {"grid.vector_count=15", "top_n=2"});
  CHECK(cfg.vector_count == 15);
  CHECK(cfg.seed == 5);
  CHECK(cfg.metric == "loss");
  CHECK(cfg.sensitivity_threshold == 0.3);
  CHECK(cfg.top_n == 2);
  CHECK(cfg.augmentation.shift_limit == 0.2);
  // untouched augmentation fields keep their defaults
  CHECK(cfg.augmentation.scale_limit == 0.1);
  CHECK(cfg.augmentation.probability[7] == 0.8);

  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  CHECK_THROWS_AS(load_config(path, {"no-equals-sign"}), ConfigError);

  const auto bad = dir / "bad.json";
  {
    std::ofstream out(bad);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_config(bad), ConfigError);
}

TEST_CASE("config validation rejects bad values") {
  Config cfg;
  cfg.metric = "f1";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = Config{};
  cfg.sensitivity_threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = Config{};
  cfg.hyperparams[0].epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = Config{};
  CHECK_NOTHROW(cfg.validate());
}
