#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "augsens/augment.hpp"
#include "augsens/model.hpp"

namespace augsens {

using CoefficientSeries = Eigen::Matrix<double, kNumAugmentations, 1>;

// Intercept plus the 9 per-augmentation coefficients of one
// (classifier, hyper-params, metric) least-squares fit.
struct SurrogateFit {
  double intercept = 0.0;
  CoefficientSeries coefficients = CoefficientSeries::Zero();
  std::string metric;         // "accuracy" | "loss"
  std::string classifier_id;
  std::string hp_descriptor;
  double rss = 0.0;
  std::vector<std::string> warnings;
};

// Minimum-norm least squares of y on [1 | X] via complete orthogonal
// decomposition; singular directions below 1e-10 of the largest are treated
// as zero. X is the n x 9 binary design matrix. Attaches warnings for
// fewer than 10 rows and for constant design columns.
SurrogateFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Z-score with the population standard deviation (divide by 9): the output
// has mean 0 and population std 1. Throws std::domain_error when every
// entry is equal.
CoefficientSeries normalize_series(const CoefficientSeries& series);

// Normalized coefficients indexed by (classifier k, hyper-param l,
// augmentation i); complete over the K x L grid.
struct CoefficientTensor {
  std::vector<std::string> classifier_ids;   // K, in grid order
  std::vector<std::string> hp_descriptors;   // L, in grid order
  std::string metric;
  bool normalized = false;
  // One L x 9 matrix per classifier.
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, kNumAugmentations>> values;

  int num_classifiers() const { return static_cast<int>(classifier_ids.size()); }
  int num_hyperparams() const { return static_cast<int>(hp_descriptors.size()); }
  double at(int k, int l, int i) const { return values[static_cast<std::size_t>(k)](l, i); }
  // The L coefficients of augmentation i under classifier k.
  Eigen::VectorXd across_hyperparams(int k, int i) const {
    return values[static_cast<std::size_t>(k)].col(i);
  }
};

// Collects the fits for one metric into a tensor of normalized series.
// Classifier/hyper-param order follows first appearance. Throws
// ConsistencyError naming any missing or duplicated cell.
CoefficientTensor build_tensor(const std::vector<SurrogateFit>& fits,
                               std::string_view metric);

// Rows = augmentation id, one column per (classifier, hyper-param) series.
void export_tensor_csv(const std::filesystem::path& path,
                       const CoefficientTensor& tensor);

void export_fits_csv(const std::filesystem::path& path,
                     const std::vector<SurrogateFit>& fits);

}  // namespace augsens
