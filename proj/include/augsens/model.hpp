#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "augsens/augment.hpp"
#include "augsens/dataset.hpp"
#include "augsens/image.hpp"

namespace augsens {

enum class OptimizerKind { kSgd, kAdam };

std::string_view optimizer_name(OptimizerKind kind);
OptimizerKind optimizer_from_name(std::string_view name);

struct HyperParams {
  OptimizerKind optimizer = OptimizerKind::kSgd;
  int epochs = 20;
  double learning_rate = 0.01;
  int batch_size = 64;

  void validate() const;  // throws std::invalid_argument
  // Canonical short form, e.g. "sgd-e20-lr0.01-b64". Used in keys, CSV
  // column headers and file names.
  std::string descriptor() const;

  bool operator==(const HyperParams&) const = default;
};

// Names a classifier architecture by id. Built-ins: "linear-softmax"
// (784 -> 10 affine) and "mlp" (784 -> 128 -> 10, rectified-linear hidden).
struct ClassifierSpec {
  std::string id;
  bool operator==(const ClassifierSpec&) const = default;
};

std::vector<std::string> builtin_classifier_ids();

struct TensorShape {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index fan_in = 0;  // input width of the owning layer
};

// Parameters live in one flat vector so optimizers and artifacts treat every
// architecture uniformly; layers view segments of it through Eigen maps.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual const std::string& id() const = 0;
  virtual std::vector<TensorShape> shapes() const = 0;
  virtual Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const = 0;
  // Mean cross-entropy over the batch and its gradient w.r.t. the flat
  // parameter vector.
  virtual double loss_and_grad(const Eigen::MatrixXd& x,
                               const std::vector<int>& labels,
                               Eigen::VectorXd& grad) const = 0;

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }
  Eigen::Index param_count() const { return params_.size(); }

  // Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per tensor.
  void init_params(std::uint64_t seed);

 protected:
  Eigen::VectorXd params_;
};

std::unique_ptr<Classifier> make_classifier(std::string_view id);

// Row-wise softmax; rows are nonnegative and sum to 1.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Pixels scaled to [0,1], one flattened row per image.
Eigen::MatrixXd to_features(const ImageList& images);
std::vector<int> to_labels(const ImageList& images);

struct EvalResult {
  double accuracy = 0.0;   // percent
  double loss = 0.0;       // mean cross-entropy
  double loss_x100 = 0.0;
};

EvalResult evaluate_outputs(const Eigen::MatrixXd& logits,
                            const std::vector<int>& labels);
// Augmentation-free evaluation; throws std::invalid_argument on an empty set.
EvalResult evaluate(const Classifier& classifier, const ImageList& images);

struct TrainCurve {
  std::vector<double> train_loss;
  std::vector<double> valid_loss;
  std::vector<double> valid_accuracy;
};

struct TrainedModel {
  std::unique_ptr<Classifier> classifier;
  TrainCurve curve;
};

// Runs hp.epochs passes of seeded shuffled mini-batches; every sample is
// augmented through apply_vector before the forward pass. Throws
// TrainingDiverged when the loss stops being finite.
TrainedModel train(const ClassifierSpec& spec, const DataSplit& data,
                   const AugVector& vector, const AugmentationParams& aug,
                   const HyperParams& hp, std::uint64_t seed);

// --- trained-model artifact -------------------------------------------------
// Binary layout: "ASM1", u32 tensor count, then (u32 rows, u32 cols) per
// tensor, then all values as little-endian float64 in tensor order. A JSON
// sidecar at <path>.json records classifier id, hyper-params and seed.

struct ModelArtifact {
  std::unique_ptr<Classifier> classifier;
  HyperParams hyperparams;
  std::uint64_t seed = 0;
};

void save_model(const std::filesystem::path& path, const Classifier& classifier,
                const HyperParams& hp, std::uint64_t seed);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace augsens
