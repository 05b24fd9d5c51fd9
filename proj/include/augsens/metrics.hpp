#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "augsens/surrogate.hpp"

namespace augsens {

enum class ReliabilityMode { kTable, kEquation };

std::string_view reliability_mode_name(ReliabilityMode mode);
ReliabilityMode reliability_mode_from_name(std::string_view name);

// Per-augmentation scores. reliability_table = sensitivity * influence;
// reliability_equation = consistency * influence (non-finite when
// sensitivity is zero).
struct MetricsRow {
  int augmentation = 0;
  std::vector<double> per_model_variance;  // one per classifier
  double sensitivity = 0.0;
  double consistency = 0.0;  // +inf when sensitivity is 0
  double influence = 0.0;
  double reliability_table = 0.0;
  double reliability_equation = 0.0;
  bool sensitive = false;
  bool reliable = false;
};

// Sample variance (divide by L-1) of augmentation i's normalized
// coefficients across the L hyper-param settings of classifier k.
// Requires a normalized tensor with L >= 2.
double per_model_variance(const CoefficientTensor& tensor, int augmentation,
                          int classifier);

// Mean of per_model_variance over classifiers.
double sensitivity(const CoefficientTensor& tensor, int augmentation);

// Reciprocal of sensitivity; +infinity at 0 (maximally consistent).
double consistency(double sensitivity_value);

// Grand mean: average over classifiers of the per-classifier mean
// coefficient across hyper-params.
double influence(const CoefficientTensor& tensor, int augmentation);

double reliability(double sensitivity_value, double consistency_value,
                   double influence_value, ReliabilityMode mode);

// All 9 rows, classification flags not yet set.
std::vector<MetricsRow> compute_metrics(const CoefficientTensor& tensor);

// sensitive <=> sensitivity >= threshold. reliable <=> reliability under
// `mode` is positive and among the top_n largest; ties resolve to the lower
// augmentation index.
void classify(std::vector<MetricsRow>& rows, double sensitivity_threshold = 0.2,
              int top_n = 3, ReliabilityMode mode = ReliabilityMode::kTable);

void export_metrics_csv(const std::filesystem::path& path,
                        const std::vector<MetricsRow>& rows,
                        const std::vector<std::string>& classifier_ids);

}  // namespace augsens
