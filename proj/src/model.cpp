#include "augsens/model.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "augsens/errors.hpp"
#include "augsens/json_io.hpp"
#include "augsens/optim.hpp"
#include "augsens/rng.hpp"

namespace augsens {
namespace {

constexpr int kFeatureDim = kImageSide * kImageSide;
constexpr int kMlpHidden = 128;

using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

// Stable per-row log-sum-exp and the mean cross-entropy against labels.
double cross_entropy(const Eigen::MatrixXd& logits,
                     const std::vector<int>& labels,
                     Eigen::MatrixXd* dlogits_out) {
  const auto n = logits.rows();
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  const Eigen::MatrixXd shifted = logits.colwise() - row_max;
  const Eigen::VectorXd lse =
      shifted.array().exp().rowwise().sum().log().matrix() + row_max;

  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    loss += lse(i) - logits(i, labels[static_cast<std::size_t>(i)]);
  }
  loss /= static_cast<double>(n);

  if (dlogits_out != nullptr) {
    Eigen::MatrixXd p =
        (shifted.colwise() - (lse - row_max)).array().exp().matrix();
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    }
    *dlogits_out = p / static_cast<double>(n);
  }
  return loss;
}

class LinearSoftmax final : public Classifier {
 public:
  LinearSoftmax() { params_ = Eigen::VectorXd::Zero(kFeatureDim * kNumClasses + kNumClasses); }

  const std::string& id() const override {
    static const std::string kId = "linear-softmax";
    return kId;
  }

  std::vector<TensorShape> shapes() const override {
    return {{"weight", kFeatureDim, kNumClasses, kFeatureDim},
            {"bias", kNumClasses, 1, kFeatureDim}};
  }

  Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const override {
    ConstMatrixMap w(params_.data(), kFeatureDim, kNumClasses);
    ConstVectorMap b(params_.data() + kFeatureDim * kNumClasses, kNumClasses);
    return (x * w).rowwise() + b.transpose();
  }

  double loss_and_grad(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                       Eigen::VectorXd& grad) const override {
    Eigen::MatrixXd dlogits;
    const double loss = cross_entropy(logits(x), labels, &dlogits);
    grad.resize(params_.size());
    MatrixMap gw(grad.data(), kFeatureDim, kNumClasses);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + kFeatureDim * kNumClasses,
                                   kNumClasses);
    gw = x.transpose() * dlogits;
    gb = dlogits.colwise().sum();
    return loss;
  }
};

class Mlp final : public Classifier {
 public:
  Mlp() {
    params_ = Eigen::VectorXd::Zero(kFeatureDim * kMlpHidden + kMlpHidden +
                                    kMlpHidden * kNumClasses + kNumClasses);
  }

  const std::string& id() const override {
    static const std::string kId = "mlp";
    return kId;
  }

  std::vector<TensorShape> shapes() const override {
    return {{"hidden_weight", kFeatureDim, kMlpHidden, kFeatureDim},
            {"hidden_bias", kMlpHidden, 1, kFeatureDim},
            {"output_weight", kMlpHidden, kNumClasses, kMlpHidden},
            {"output_bias", kNumClasses, 1, kMlpHidden}};
  }

  Eigen::MatrixXd logits(const Eigen::MatrixXd& x) const override {
    const auto view = map_params(params_.data());
    const Eigen::MatrixXd h =
        ((x * view.w1).rowwise() + view.b1.transpose()).cwiseMax(0.0);
    return (h * view.w2).rowwise() + view.b2.transpose();
  }

  double loss_and_grad(const Eigen::MatrixXd& x, const std::vector<int>& labels,
                       Eigen::VectorXd& grad) const override {
    const auto view = map_params(params_.data());
    const Eigen::MatrixXd pre = (x * view.w1).rowwise() + view.b1.transpose();
    const Eigen::MatrixXd h = pre.cwiseMax(0.0);
    const Eigen::MatrixXd out = (h * view.w2).rowwise() + view.b2.transpose();

    Eigen::MatrixXd dlogits;
    const double loss = cross_entropy(out, labels, &dlogits);

    grad.resize(params_.size());
    auto g = map_params_mut(grad.data());
    g.w2 = h.transpose() * dlogits;
    g.b2 = dlogits.colwise().sum();
    const Eigen::MatrixXd dh =
        (dlogits * view.w2.transpose()).array() *
        (pre.array() > 0.0).cast<double>();
    g.w1 = x.transpose() * dh;
    g.b1 = dh.colwise().sum();
    return loss;
  }

 private:
  struct ConstView {
    ConstMatrixMap w1;
    ConstVectorMap b1;
    ConstMatrixMap w2;
    ConstVectorMap b2;
  };
  struct MutView {
    MatrixMap w1;
    Eigen::Map<Eigen::VectorXd> b1;
    MatrixMap w2;
    Eigen::Map<Eigen::VectorXd> b2;
  };

  static ConstView map_params(const double* p) {
    return {ConstMatrixMap(p, kFeatureDim, kMlpHidden),
            ConstVectorMap(p + kFeatureDim * kMlpHidden, kMlpHidden),
            ConstMatrixMap(p + kFeatureDim * kMlpHidden + kMlpHidden, kMlpHidden,
                           kNumClasses),
            ConstVectorMap(p + kFeatureDim * kMlpHidden + kMlpHidden +
                               kMlpHidden * kNumClasses,
                           kNumClasses)};
  }
  static MutView map_params_mut(double* p) {
    return {MatrixMap(p, kFeatureDim, kMlpHidden),
            Eigen::Map<Eigen::VectorXd>(p + kFeatureDim * kMlpHidden, kMlpHidden),
            MatrixMap(p + kFeatureDim * kMlpHidden + kMlpHidden, kMlpHidden,
                      kNumClasses),
            Eigen::Map<Eigen::VectorXd>(p + kFeatureDim * kMlpHidden +
                                            kMlpHidden + kMlpHidden * kNumClasses,
                                        kNumClasses)};
  }
};

std::uint64_t sub_seed(std::uint64_t seed, std::string_view role, int index) {
  return StableHash()
      .add(seed)
      .add(role)
      .add(static_cast<std::uint64_t>(index))
      .value();
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  char bytes[4];
  for (int i = 0; i < 4; ++i) bytes[i] = static_cast<char>(v >> (8 * i));
  out.write(bytes, 4);
}

std::uint32_t read_u32_le(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
  return v;
}

void write_f64_le(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>(bits >> (8 * i));
  out.write(bytes, 8);
}

double read_f64_le(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string_view optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::kSgd ? "sgd" : "adam";
}

OptimizerKind optimizer_from_name(std::string_view name) {
  if (name == "sgd" || name == "SGD") return OptimizerKind::kSgd;
  if (name == "adam" || name == "Adam") return OptimizerKind::kAdam;
  throw std::invalid_argument("unknown optimizer: " + std::string(name));
}

void HyperParams::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw std::invalid_argument("learning rate must be positive");
  }
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
}

std::string HyperParams::descriptor() const {
  std::ostringstream os;
  os << optimizer_name(optimizer) << "-e" << epochs << "-lr" << learning_rate
     << "-b" << batch_size;
  return os.str();
}

std::vector<std::string> builtin_classifier_ids() {
  return {"linear-softmax", "mlp"};
}

void Classifier::init_params(std::uint64_t seed) {
  Rng rng(seed);
  Eigen::Index offset = 0;
  for (const TensorShape& shape : shapes()) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(shape.fan_in));
    const Eigen::Index n = shape.rows * shape.cols;
    for (Eigen::Index i = 0; i < n; ++i) {
      params_(offset + i) = rng.uniform(-bound, bound);
    }
    offset += n;
  }
}

std::unique_ptr<Classifier> make_classifier(std::string_view id) {
  if (id == "linear-softmax") return std::make_unique<LinearSoftmax>();
  if (id == "mlp") return std::make_unique<Mlp>();
  throw std::invalid_argument("unknown classifier: " + std::string(id));
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  const Eigen::VectorXd row_max = logits.rowwise().maxCoeff();
  Eigen::MatrixXd p = (logits.colwise() - row_max).array().exp().matrix();
  const Eigen::VectorXd sums = p.rowwise().sum();
  return p.array().colwise() / sums.array();
}

Eigen::MatrixXd to_features(const ImageList& images) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(images.size()), kFeatureDim);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& px = images[i].pixels;
    for (Eigen::Index j = 0; j < px.size(); ++j) {
      x(static_cast<Eigen::Index>(i), j) = px.data()[j] / 255.0;
    }
  }
  return x;
}

std::vector<int> to_labels(const ImageList& images) {
  std::vector<int> labels(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) labels[i] = images[i].label;
  return labels;
}

EvalResult evaluate_outputs(const Eigen::MatrixXd& logits,
                            const std::vector<int>& labels) {
  if (labels.empty()) {
    throw std::invalid_argument("evaluation set must be nonempty");
  }
  Eigen::Index correct = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index pred;
    logits.row(i).maxCoeff(&pred);
    if (pred == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  EvalResult r;
  r.accuracy = 100.0 * static_cast<double>(correct) /
               static_cast<double>(logits.rows());
  r.loss = cross_entropy(logits, labels, nullptr);
  r.loss_x100 = 100.0 * r.loss;
  return r;
}

EvalResult evaluate(const Classifier& classifier, const ImageList& images) {
  if (images.empty()) {
    throw std::invalid_argument("evaluation set must be nonempty");
  }
  constexpr std::size_t kChunk = 4096;
  double loss_sum = 0.0;
  Eigen::Index correct = 0;
  for (std::size_t start = 0; start < images.size(); start += kChunk) {
    const std::size_t end = std::min(images.size(), start + kChunk);
    const ImageList chunk(images.begin() + static_cast<std::ptrdiff_t>(start),
                          images.begin() + static_cast<std::ptrdiff_t>(end));
    const Eigen::MatrixXd logits = classifier.logits(to_features(chunk));
    const auto labels = to_labels(chunk);
    const EvalResult partial = evaluate_outputs(logits, labels);
    loss_sum += partial.loss * static_cast<double>(chunk.size());
    correct += static_cast<Eigen::Index>(
        std::lround(partial.accuracy / 100.0 * static_cast<double>(chunk.size())));
  }
  EvalResult r;
  r.accuracy =
      100.0 * static_cast<double>(correct) / static_cast<double>(images.size());
  r.loss = loss_sum / static_cast<double>(images.size());
  r.loss_x100 = 100.0 * r.loss;
  return r;
}

TrainedModel train(const ClassifierSpec& spec, const DataSplit& data,
                   const AugVector& vector, const AugmentationParams& aug,
                   const HyperParams& hp, std::uint64_t seed) {
  hp.validate();
  aug.validate();
  if (data.train.empty()) {
    throw std::invalid_argument("training set must be nonempty");
  }

  TrainedModel result;
  result.classifier = make_classifier(spec.id);
  Classifier& model = *result.classifier;
  model.init_params(sub_seed(seed, "init", 0));

  AdamState adam(model.param_count());
  Eigen::VectorXd grad(model.param_count());
  const auto n = data.train.size();
  const auto batch = static_cast<std::size_t>(hp.batch_size);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    Rng shuffle_rng(sub_seed(seed, "shuffle", epoch));
    Rng aug_rng(sub_seed(seed, "augment", epoch));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      const auto b = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd x(b, kFeatureDim);
      std::vector<int> labels(static_cast<std::size_t>(b));
      for (std::size_t k = start; k < end; ++k) {
        const Image augmented =
            apply_vector(data.train[order[k]], vector, aug, aug_rng);
        const auto row = static_cast<Eigen::Index>(k - start);
        for (Eigen::Index j = 0; j < augmented.pixels.size(); ++j) {
          x(row, j) = augmented.pixels.data()[j] / 255.0;
        }
        labels[static_cast<std::size_t>(row)] = augmented.label;
      }

      const double loss = model.loss_and_grad(x, labels, grad);
      if (!std::isfinite(loss)) {
        throw TrainingDiverged(epoch, "non-finite loss at epoch " +
                                          std::to_string(epoch));
      }
      if (hp.optimizer == OptimizerKind::kSgd) {
        sgd_step(model.params(), grad, hp.learning_rate);
      } else {
        adam_step(adam, model.params(), grad, hp.learning_rate);
      }
      epoch_loss += loss * static_cast<double>(b);
    }
    result.curve.train_loss.push_back(epoch_loss / static_cast<double>(n));

    if (!data.valid.empty()) {
      const EvalResult v = evaluate(model, data.valid);
      result.curve.valid_loss.push_back(v.loss);
      result.curve.valid_accuracy.push_back(v.accuracy);
    }
  }
  return result;
}

void save_model(const std::filesystem::path& path, const Classifier& classifier,
                const HyperParams& hp, std::uint64_t seed) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());

  const auto shapes = classifier.shapes();
  out.write("ASM1", 4);
  write_u32_le(out, static_cast<std::uint32_t>(shapes.size()));
  for (const TensorShape& s : shapes) {
    write_u32_le(out, static_cast<std::uint32_t>(s.rows));
    write_u32_le(out, static_cast<std::uint32_t>(s.cols));
  }
  const Eigen::VectorXd& p = classifier.params();
  for (Eigen::Index i = 0; i < p.size(); ++i) write_f64_le(out, p(i));
  if (!out) throw IoError("short write to " + path.string());
  out.close();

  nlohmann::json manifest{{"classifier", classifier.id()},
                          {"hyperparams", hp},
                          {"seed", seed},
                          {"param_count", classifier.param_count()}};
  std::ofstream side(path.string() + ".json", std::ios::trunc);
  if (!side) throw IoError("cannot write " + path.string() + ".json");
  side << manifest.dump(2) << "\n";
}

ModelArtifact load_model(const std::filesystem::path& path) {
  std::ifstream side(path.string() + ".json");
  if (!side) throw IoError("cannot open " + path.string() + ".json");
  nlohmann::json manifest;
  side >> manifest;

  ModelArtifact artifact;
  artifact.classifier =
      make_classifier(manifest.at("classifier").get<std::string>());
  artifact.hyperparams = manifest.at("hyperparams").get<HyperParams>();
  artifact.seed = manifest.at("seed").get<std::uint64_t>();

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "ASM1", 4) != 0) {
    throw FormatError("bad model magic in " + path.string());
  }
  const auto shapes = artifact.classifier->shapes();
  if (read_u32_le(in) != shapes.size()) {
    throw FormatError("tensor count mismatch in " + path.string());
  }
  for (const TensorShape& s : shapes) {
    if (read_u32_le(in) != s.rows || read_u32_le(in) != s.cols) {
      throw FormatError("tensor shape mismatch in " + path.string());
    }
  }
  Eigen::VectorXd& p = artifact.classifier->params();
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = read_f64_le(in);
  if (!in) throw IoError("truncated model payload in " + path.string());
  return artifact;
}

}  // namespace augsens
