#include <doctest.h>

#include <cmath>

#include "augsens/errors.hpp"
#include "augsens/rng.hpp"
#include "augsens/surrogate.hpp"
#include "golden.hpp"
#include "test_support.hpp"

using namespace augsens;

namespace {

Eigen::MatrixXd design_from_vectors(const std::vector<AugVector>& vectors) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(vectors.size()), 9);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (int j = 0; j < 9; ++j) {
      X(static_cast<Eigen::Index>(i), j) = vectors[i].bits[j] ? 1.0 : 0.0;
    }
  }
  return X;
}

Eigen::MatrixXd all_nonzero_vectors() {
  Eigen::MatrixXd X(511, 9);
  for (int mask = 1; mask <= 511; ++mask) {
    for (int j = 0; j < 9; ++j) X(mask - 1, j) = (mask >> j) & 1 ? 1.0 : 0.0;
  }
  return X;
}

}  // namespace

TEST_CASE("a constant target yields intercept c and zero coefficients") {
  const Eigen::MatrixXd X = design_from_vectors(generate_vectors(50, 2));
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(50, 4.25);
  const SurrogateFit fit = fit_ols(X, y);
  CHECK(fit.intercept == doctest::Approx(4.25).epsilon(1e-12));
  for (int i = 0; i < 9; ++i) CHECK(std::abs(fit.coefficients(i)) < 1e-9);
  CHECK(fit.rss < 1e-18);
}

TEST_CASE("planted model over all 511 vectors is recovered to 1e-9") {
  const Eigen::MatrixXd X = all_nonzero_vectors();
  const Eigen::VectorXd y = 3.0 * Eigen::VectorXd::Ones(511) + 2.0 * X.col(2) - X.col(7);
  const SurrogateFit fit = fit_ols(X, y);
  CHECK(std::abs(fit.intercept - 3.0) < 1e-9);
  for (int i = 0; i < 9; ++i) {
    const double expected = i == 2 ? 2.0 : (i == 7 ? -1.0 : 0.0);
    CAPTURE(i);
    CHECK(std::abs(fit.coefficients(i) - expected) < 1e-9);
  }
}

TEST_CASE("residuals are orthogonal to every design column") {
  Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 20 + static_cast<int>(rng.uniform_int(30));
    Eigen::MatrixXd X(n, 9);
    for (Eigen::Index i = 0; i < X.size(); ++i) {
      X.data()[i] = rng.uniform() < 0.5 ? 1.0 : 0.0;
    }
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = rng.uniform(0.0, 100.0);

    const SurrogateFit fit = fit_ols(X, y);
    Eigen::VectorXd residual = y;
    residual.array() -= fit.intercept;
    residual -= X * fit.coefficients;

    const double scale = y.norm();
    CHECK(std::abs(residual.sum()) <=
          1e-8 * scale * std::sqrt(static_cast<double>(n)));
    for (int j = 0; j < 9; ++j) {
      CHECK(std::abs(X.col(j).dot(residual)) <= 1e-8 * scale * X.col(j).norm() + 1e-12);
    }
  }
}

TEST_CASE("adding a constant shifts only the intercept") {
  Rng rng(44);
  const Eigen::MatrixXd X = design_from_vectors(generate_vectors(28, 9));
  Eigen::VectorXd y(28);
  for (int i = 0; i < 28; ++i) y(i) = rng.uniform(50.0, 90.0);

  const SurrogateFit base = fit_ols(X, y);
  const SurrogateFit shifted = fit_ols(X, y.array() + 17.5);
  CHECK(shifted.intercept == doctest::Approx(base.intercept + 17.5).epsilon(1e-9));
  for (int i = 0; i < 9; ++i) {
    CHECK(std::abs(shifted.coefficients(i) - base.coefficients(i)) < 1e-9);
  }
}

TEST_CASE("scaling the target scales the fit; the normalized series is invariant") {
  Rng rng(55);
  const Eigen::MatrixXd X = design_from_vectors(generate_vectors(28, 10));
  Eigen::VectorXd y(28);
  for (int i = 0; i < 28; ++i) y(i) = rng.uniform(10.0, 40.0);

  const SurrogateFit base = fit_ols(X, y);
  const SurrogateFit scaled = fit_ols(X, 3.5 * y);
  CHECK(scaled.intercept == doctest::Approx(3.5 * base.intercept).epsilon(1e-9));
  for (int i = 0; i < 9; ++i) {
    CHECK(scaled.coefficients(i) ==
          doctest::Approx(3.5 * base.coefficients(i)).epsilon(1e-9));
  }
  const CoefficientSeries na = normalize_series(base.coefficients);
  const CoefficientSeries nb = normalize_series(scaled.coefficients);
  for (int i = 0; i < 9; ++i) CHECK(std::abs(na(i) - nb(i)) < 1e-9);
}

TEST_CASE("noiseless linear data of 11+ rows is recovered exactly") {
  Rng rng(66);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 11 + static_cast<int>(rng.uniform_int(30));
    const auto vectors = generate_vectors(n, 1000 + static_cast<std::uint64_t>(trial));
    const Eigen::MatrixXd X = design_from_vectors(vectors);
    Eigen::VectorXd truth(10);
    for (int i = 0; i < 10; ++i) truth(i) = rng.uniform(-5.0, 5.0);
    const Eigen::VectorXd y =
        truth(0) + (X * truth.tail(9)).array();

    const SurrogateFit fit = fit_ols(X, y);
    CHECK(std::abs(fit.intercept - truth(0)) < 1e-9);
    for (int i = 0; i < 9; ++i) {
      CHECK(std::abs(fit.coefficients(i) - truth(i + 1)) < 1e-9);
    }
    CHECK(fit.rss < 1e-16);
  }
}

TEST_CASE("fit warnings: short series and constant columns") {
  Eigen::MatrixXd X = design_from_vectors(generate_vectors(8, 3));
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(8, 1.0, 8.0);
  const SurrogateFit short_fit = fit_ols(X, y);
  REQUIRE_FALSE(short_fit.warnings.empty());
  CHECK(short_fit.warnings[0].find("fewer than 10") != std::string::npos);

  Eigen::MatrixXd X2 = design_from_vectors(generate_vectors(20, 3));
  X2.col(3).setOnes();  // augmentation 3 always on
  Eigen::VectorXd y2 = Eigen::VectorXd::LinSpaced(20, 0.0, 19.0);
  const SurrogateFit const_fit = fit_ols(X2, y2);
  bool saw = false;
  for (const auto& w : const_fit.warnings) {
    if (w.find("augmentation 3") != std::string::npos) saw = true;
  }
  CHECK(saw);
  CHECK(std::isfinite(const_fit.intercept));
}

TEST_CASE("rank-deficient designs get the minimum-norm solution") {
  // column 5 duplicates column 1: coefficients split evenly between them
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(24, 9);
  Rng rng(77);
  for (int i = 0; i < 24; ++i) {
    for (int j = 0; j < 9; ++j) X(i, j) = rng.uniform() < 0.5 ? 1.0 : 0.0;
    X(i, 5) = X(i, 1);
  }
  const Eigen::VectorXd y = 2.0 + 4.0 * X.col(1).array();
  const SurrogateFit fit = fit_ols(X, y);
  CHECK(fit.rss < 1e-16);
  CHECK(fit.coefficients(1) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.coefficients(5) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("normalization: golden series already satisfy the convention") {
  // first golden accuracy series
  CoefficientSeries s;
  for (int i = 0; i < 9; ++i) s(i) = golden::kAccuracySeries[0][0][static_cast<std::size_t>(i)];
  CHECK(std::abs(s.mean()) < 1e-3);
  CHECK(std::abs(s.squaredNorm() - 9.0) < 1e-3);
  const CoefficientSeries n = normalize_series(s);
  CHECK(std::abs(n.mean()) < 1e-12);
  CHECK(n.squaredNorm() == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("normalization of an arithmetic ramp is symmetric with zero center") {
  CoefficientSeries ramp;
  for (int i = 0; i < 9; ++i) ramp(i) = i + 1.0;
  const CoefficientSeries n = normalize_series(ramp);
  CHECK(n(4) == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 0; i < 9; ++i) {
    CHECK(n(i) == doctest::Approx(-n(8 - i)).epsilon(1e-12));
  }
}

TEST_CASE("normalize_series is idempotent and rejects constant input") {
  Rng rng(88);
  CoefficientSeries s;
  for (int i = 0; i < 9; ++i) s(i) = rng.uniform(-4.0, 4.0);
  const CoefficientSeries once = normalize_series(s);
  const CoefficientSeries twice = normalize_series(once);
  for (int i = 0; i < 9; ++i) {
    CHECK(twice(i) == doctest::Approx(once(i)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normalize_series(CoefficientSeries::Constant(2.0)),
                  std::domain_error);
}

TEST_CASE("build_tensor assembles the full grid and validates normalization") {
  std::vector<SurrogateFit> fits;
  Rng rng(101);
  const std::vector<std::string> classifiers = {"linear-softmax", "mlp"};
  const auto hps = default_hyperparams();
  for (const auto& cls : classifiers) {
    for (const auto& hp : hps) {
      SurrogateFit fit;
      fit.metric = "accuracy";
      fit.classifier_id = cls;
      fit.hp_descriptor = hp.descriptor();
      for (int i = 0; i < 9; ++i) fit.coefficients(i) = rng.uniform(-3.0, 3.0);
      fits.push_back(fit);
    }
  }

  const CoefficientTensor tensor = build_tensor(fits, "accuracy");
  CHECK(tensor.normalized);
  CHECK(tensor.num_classifiers() == 2);
  CHECK(tensor.num_hyperparams() == 4);
  for (int k = 0; k < 2; ++k) {
    for (int l = 0; l < 4; ++l) {
      double mean = 0.0;
      double ss = 0.0;
      for (int i = 0; i < 9; ++i) mean += tensor.at(k, l, i);
      mean /= 9.0;
      for (int i = 0; i < 9; ++i) {
        ss += (tensor.at(k, l, i) - mean) * (tensor.at(k, l, i) - mean);
      }
      CHECK(std::abs(mean) < 1e-6);
      CHECK(std::abs(std::sqrt(ss / 9.0) - 1.0) < 1e-6);
    }
  }

  SUBCASE("singleton grid") {
    const std::vector<SurrogateFit> one(fits.begin(), fits.begin() + 1);
    const CoefficientTensor t = build_tensor(one, "accuracy");
    CHECK(t.num_classifiers() == 1);
    CHECK(t.num_hyperparams() == 1);
  }

  SUBCASE("missing cell is named") {
    std::vector<SurrogateFit> incomplete(fits.begin(), fits.end() - 1);
    try {
      build_tensor(incomplete, "accuracy");
      FAIL("expected ConsistencyError");
    } catch (const ConsistencyError& e) {
      const std::string what = e.what();
      CHECK(what.find("mlp") != std::string::npos);
      CHECK(what.find(hps[3].descriptor()) != std::string::npos);
    }
  }

  SUBCASE("duplicate cell is rejected") {
    std::vector<SurrogateFit> duplicated = fits;
    duplicated.push_back(fits[0]);
    CHECK_THROWS_AS(build_tensor(duplicated, "accuracy"), ConsistencyError);
  }

  SUBCASE("no fits for the metric") {
    CHECK_THROWS_AS(build_tensor(fits, "loss"), ConsistencyError);
  }
}

TEST_CASE("golden experiment: accuracy intercepts are recovered exactly") {
  const golden::FixtureExperiment fx = golden::make_fixture_experiment();
  const Eigen::MatrixXd X = design_from_vectors(fx.plan.grid.vectors);

  for (int l = 0; l < golden::kNumSettings; ++l) {
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      double acc = golden::kAccuracyIntercepts[0][static_cast<std::size_t>(l)];
      for (int j = 0; j < 9; ++j) {
        if (X(i, j) > 0.5) {
          acc += golden::kAccuracySeries[0][static_cast<std::size_t>(l)]
                                        [static_cast<std::size_t>(j)];
        }
      }
      y(i) = acc;
    }
    const SurrogateFit fit = fit_ols(X, y);
    CHECK(fit.intercept ==
          doctest::Approx(golden::kAccuracyIntercepts[0][static_cast<std::size_t>(l)])
              .epsilon(1e-9));
    for (int j = 0; j < 9; ++j) {
      CHECK(fit.coefficients(j) ==
            doctest::Approx(golden::kAccuracySeries[0][static_cast<std::size_t>(l)]
                                                   [static_cast<std::size_t>(j)])
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("fit_ols validates input shapes") {
  CHECK_THROWS_AS(fit_ols(Eigen::MatrixXd::Zero(5, 8), Eigen::VectorXd::Zero(5)),
                  std::invalid_argument);
  CHECK_THROWS_AS(fit_ols(Eigen::MatrixXd::Zero(5, 9), Eigen::VectorXd::Zero(4)),
                  std::invalid_argument);
}

TEST_CASE("tensor and fit CSV exports are written") {
  testsup::TempDir dir;
  const CoefficientTensor tensor = golden::make_tensor();
  export_tensor_csv(dir / "tensor.csv", tensor);
  const std::string content = testsup::read_file(dir / "tensor.csv");
  CHECK(content.find("aug_id,aug_name") == 0);
  CHECK(content.find("linear-softmax|sgd-e20-lr0.01-b64") != std::string::npos);
  // 9 augmentation rows + header
  CHECK(std::count(content.begin(), content.end(), '\n') == 10);
}
