#include "augsens/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "augsens/errors.hpp"

namespace augsens {
namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

SurrogateFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.cols() != kNumAugmentations) {
    throw std::invalid_argument("design matrix must have 9 columns");
  }
  if (X.rows() != y.size() || X.rows() == 0) {
    throw std::invalid_argument("design matrix and target sizes disagree");
  }

  SurrogateFit fit;
  if (X.rows() < kNumAugmentations + 1) {
    fit.warnings.push_back("fewer than 10 runs; fit is underdetermined");
  }
  for (int j = 0; j < kNumAugmentations; ++j) {
    if ((X.col(j).array() == X(0, j)).all()) {
      fit.warnings.push_back("augmentation " + std::to_string(j) +
                             " is constant in the design");
    }
  }

  Eigen::MatrixXd design(X.rows(), kNumAugmentations + 1);
  design.col(0).setOnes();
  design.rightCols(kNumAugmentations) = X;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(design);
  const Eigen::VectorXd beta = cod.solve(y);

  fit.intercept = beta(0);
  fit.coefficients = beta.tail(kNumAugmentations);
  fit.rss = (y - design * beta).squaredNorm();
  return fit;
}

CoefficientSeries normalize_series(const CoefficientSeries& series) {
  const double mean = series.mean();
  const double pop_var =
      (series.array() - mean).square().sum() / kNumAugmentations;
  if (pop_var == 0.0) {
    throw std::domain_error("cannot normalize a constant series");
  }
  return (series.array() - mean) / std::sqrt(pop_var);
}

CoefficientTensor build_tensor(const std::vector<SurrogateFit>& fits,
                               std::string_view metric) {
  CoefficientTensor tensor;
  tensor.metric = metric;

  std::vector<const SurrogateFit*> selected;
  for (const SurrogateFit& fit : fits) {
    if (fit.metric != metric) continue;
    selected.push_back(&fit);
    if (std::find(tensor.classifier_ids.begin(), tensor.classifier_ids.end(),
                  fit.classifier_id) == tensor.classifier_ids.end()) {
      tensor.classifier_ids.push_back(fit.classifier_id);
    }
    if (std::find(tensor.hp_descriptors.begin(), tensor.hp_descriptors.end(),
                  fit.hp_descriptor) == tensor.hp_descriptors.end()) {
      tensor.hp_descriptors.push_back(fit.hp_descriptor);
    }
  }
  if (selected.empty()) {
    throw ConsistencyError("no fits for metric '" + std::string(metric) + "'");
  }

  const int K = tensor.num_classifiers();
  const int L = tensor.num_hyperparams();
  tensor.values.assign(
      static_cast<std::size_t>(K),
      Eigen::Matrix<double, Eigen::Dynamic, kNumAugmentations>::Zero(L, kNumAugmentations));

  std::vector<std::vector<bool>> filled(
      static_cast<std::size_t>(K), std::vector<bool>(static_cast<std::size_t>(L), false));
  for (const SurrogateFit* fit : selected) {
    const auto k = static_cast<std::size_t>(
        std::find(tensor.classifier_ids.begin(), tensor.classifier_ids.end(),
                  fit->classifier_id) -
        tensor.classifier_ids.begin());
    const auto l = static_cast<std::size_t>(
        std::find(tensor.hp_descriptors.begin(), tensor.hp_descriptors.end(),
                  fit->hp_descriptor) -
        tensor.hp_descriptors.begin());
    if (filled[k][l]) {
      throw ConsistencyError("duplicate fit for (" + fit->classifier_id + ", " +
                             fit->hp_descriptor + ", " + fit->metric + ")");
    }
    filled[k][l] = true;
    CoefficientSeries normalized;
    try {
      normalized = normalize_series(fit->coefficients);
    } catch (const std::domain_error&) {
      throw ConsistencyError("constant coefficient series for (" +
                             fit->classifier_id + ", " + fit->hp_descriptor +
                             ", " + fit->metric + ")");
    }
    tensor.values[k].row(static_cast<Eigen::Index>(l)) = normalized.transpose();
  }

  for (int k = 0; k < K; ++k) {
    for (int l = 0; l < L; ++l) {
      if (!filled[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]) {
        throw ConsistencyError("missing fit for (" + tensor.classifier_ids[static_cast<std::size_t>(k)] +
                               ", " + tensor.hp_descriptors[static_cast<std::size_t>(l)] + ", " +
                               tensor.metric + ")");
      }
    }
  }

  tensor.normalized = true;
  return tensor;
}

void export_tensor_csv(const std::filesystem::path& path,
                       const CoefficientTensor& tensor) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());

  out << "aug_id,aug_name";
  for (const std::string& cls : tensor.classifier_ids) {
    for (const std::string& hp : tensor.hp_descriptors) {
      out << "," << cls << "|" << hp;
    }
  }
  out << "\n";
  for (int i = 0; i < kNumAugmentations; ++i) {
    out << i << "," << augmentation_name(static_cast<AugmentationId>(i));
    for (int k = 0; k < tensor.num_classifiers(); ++k) {
      for (int l = 0; l < tensor.num_hyperparams(); ++l) {
        out << "," << format_double(tensor.at(k, l, i));
      }
    }
    out << "\n";
  }
}

void export_fits_csv(const std::filesystem::path& path,
                     const std::vector<SurrogateFit>& fits) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());

  out << "classifier,hyperparams,metric,intercept";
  for (int i = 0; i < kNumAugmentations; ++i) out << ",coef_" << i;
  out << ",rss,warnings\n";
  for (const SurrogateFit& fit : fits) {
    out << fit.classifier_id << "," << fit.hp_descriptor << "," << fit.metric
        << "," << format_double(fit.intercept);
    for (int i = 0; i < kNumAugmentations; ++i) {
      out << "," << format_double(fit.coefficients(i));
    }
    out << "," << format_double(fit.rss) << ",";
    for (std::size_t w = 0; w < fit.warnings.size(); ++w) {
      if (w > 0) out << "; ";
      out << fit.warnings[w];
    }
    out << "\n";
  }
}

}  // namespace augsens
