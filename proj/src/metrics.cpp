#include "augsens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "augsens/errors.hpp"

namespace augsens {
namespace {

void require_usable(const CoefficientTensor& tensor) {
  if (!tensor.normalized) {
    throw std::invalid_argument("metrics require a normalized tensor");
  }
  if (tensor.num_hyperparams() < 2) {
    throw std::invalid_argument(
        "metrics require at least 2 hyper-param settings");
  }
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string_view reliability_mode_name(ReliabilityMode mode) {
  return mode == ReliabilityMode::kTable ? "table" : "equation";
}

ReliabilityMode reliability_mode_from_name(std::string_view name) {
  if (name == "table") return ReliabilityMode::kTable;
  if (name == "equation") return ReliabilityMode::kEquation;
  throw std::invalid_argument("unknown reliability mode: " + std::string(name));
}

double per_model_variance(const CoefficientTensor& tensor, int augmentation,
                          int classifier) {
  require_usable(tensor);
  const Eigen::VectorXd series =
      tensor.across_hyperparams(classifier, augmentation);
  const double mean = series.mean();
  return (series.array() - mean).square().sum() /
         static_cast<double>(series.size() - 1);
}

double sensitivity(const CoefficientTensor& tensor, int augmentation) {
  require_usable(tensor);
  double sum = 0.0;
  for (int k = 0; k < tensor.num_classifiers(); ++k) {
    sum += per_model_variance(tensor, augmentation, k);
  }
  return sum / tensor.num_classifiers();
}

double consistency(double sensitivity_value) {
  if (sensitivity_value < 0.0) {
    throw std::invalid_argument("sensitivity must be nonnegative");
  }
  if (sensitivity_value == 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return 1.0 / sensitivity_value;
}

double influence(const CoefficientTensor& tensor, int augmentation) {
  require_usable(tensor);
  double sum = 0.0;
  for (int k = 0; k < tensor.num_classifiers(); ++k) {
    sum += tensor.across_hyperparams(k, augmentation).mean();
  }
  return sum / tensor.num_classifiers();
}

double reliability(double sensitivity_value, double consistency_value,
                   double influence_value, ReliabilityMode mode) {
  if (mode == ReliabilityMode::kTable) {
    return sensitivity_value * influence_value;
  }
  return consistency_value * influence_value;
}

std::vector<MetricsRow> compute_metrics(const CoefficientTensor& tensor) {
  require_usable(tensor);
  std::vector<MetricsRow> rows(kNumAugmentations);
  for (int i = 0; i < kNumAugmentations; ++i) {
    MetricsRow& row = rows[static_cast<std::size_t>(i)];
    row.augmentation = i;
    for (int k = 0; k < tensor.num_classifiers(); ++k) {
      row.per_model_variance.push_back(per_model_variance(tensor, i, k));
    }
    row.sensitivity =
        std::accumulate(row.per_model_variance.begin(),
                        row.per_model_variance.end(), 0.0) /
        static_cast<double>(row.per_model_variance.size());
    row.consistency = consistency(row.sensitivity);
    row.influence = influence(tensor, i);
    row.reliability_table =
        reliability(row.sensitivity, row.consistency, row.influence,
                    ReliabilityMode::kTable);
    row.reliability_equation =
        reliability(row.sensitivity, row.consistency, row.influence,
                    ReliabilityMode::kEquation);
  }
  return rows;
}

void classify(std::vector<MetricsRow>& rows, double sensitivity_threshold,
              int top_n, ReliabilityMode mode) {
  for (MetricsRow& row : rows) {
    row.sensitive = row.sensitivity >= sensitivity_threshold;
    row.reliable = false;
  }

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto score = [&](std::size_t i) {
    return mode == ReliabilityMode::kTable ? rows[i].reliability_table
                                           : rows[i].reliability_equation;
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score(a) != score(b)) return score(a) > score(b);
    return rows[a].augmentation < rows[b].augmentation;
  });
  for (std::size_t rank = 0;
       rank < std::min<std::size_t>(order.size(), static_cast<std::size_t>(top_n));
       ++rank) {
    MetricsRow& row = rows[order[rank]];
    if (score(order[rank]) > 0.0) row.reliable = true;
  }
}

void export_metrics_csv(const std::filesystem::path& path,
                        const std::vector<MetricsRow>& rows,
                        const std::vector<std::string>& classifier_ids) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());

  out << "aug_id,aug_name";
  for (std::size_t k = 0; k < classifier_ids.size(); ++k) {
    out << ",var_m" << (k + 1);
  }
  out << ",sensitivity,consistency,influence,reliability_table,"
         "reliability_equation,sensitive,reliable\n";
  for (const MetricsRow& row : rows) {
    out << row.augmentation << ","
        << augmentation_name(static_cast<AugmentationId>(row.augmentation));
    for (const double v : row.per_model_variance) {
      out << "," << format_double(v);
    }
    out << "," << format_double(row.sensitivity) << ","
        << format_double(row.consistency) << "," << format_double(row.influence)
        << "," << format_double(row.reliability_table) << ","
        << format_double(row.reliability_equation) << ","
        << (row.sensitive ? "true" : "false") << ","
        << (row.reliable ? "true" : "false") << "\n";
  }
}

}  // namespace augsens
