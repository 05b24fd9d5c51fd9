#include "augsens/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "augsens/rng.hpp"

namespace augsens {
namespace {

// Picks n images, class-balanced. Quotas: floor(n / C) each, the first
// n % C classes (ascending label) get one extra. Shortfalls in small classes
// spill round-robin to classes with spare images. Selection inside a class
// is a seeded shuffle; the result keeps the original list order.
ImageList stratified_take(const ImageList& images, std::size_t n, Rng& rng) {
  if (n >= images.size()) {
    return images;
  }
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < images.size(); ++i) {
    by_class[images[i].label].push_back(i);
  }

  const std::size_t n_classes = by_class.size();
  std::map<int, std::size_t> quota;
  std::size_t assigned = 0;
  std::size_t extra = n % n_classes;
  for (auto& [label, idx] : by_class) {
    std::size_t want = n / n_classes + (extra > 0 ? 1 : 0);
    if (extra > 0) --extra;
    quota[label] = std::min(want, idx.size());
    assigned += quota[label];
  }
  while (assigned < n) {
    bool grew = false;
    for (auto& [label, idx] : by_class) {
      if (assigned == n) break;
      if (quota[label] < idx.size()) {
        ++quota[label];
        ++assigned;
        grew = true;
      }
    }
    if (!grew) break;  // every class exhausted
  }

  std::vector<std::size_t> selected;
  selected.reserve(n);
  for (auto& [label, idx] : by_class) {
    rng.shuffle(idx);
    selected.insert(selected.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(quota[label]));
  }
  std::sort(selected.begin(), selected.end());

  ImageList out;
  out.reserve(selected.size());
  for (const std::size_t i : selected) {
    out.push_back(images[i]);
  }
  return out;
}

}  // namespace

DataSplit split(ImageList train_pool, ImageList test, std::uint64_t seed) {
  if (train_pool.size() < 2) {
    throw std::invalid_argument("train pool must hold at least 2 images");
  }
  Rng rng(seed);
  rng.shuffle(train_pool);

  const auto n = train_pool.size();
  const auto n_train =
      static_cast<std::size_t>(std::llround(0.85 * static_cast<double>(n)));

  DataSplit out;
  out.train.assign(train_pool.begin(),
                   train_pool.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.valid.assign(train_pool.begin() + static_cast<std::ptrdiff_t>(n_train),
                   train_pool.end());
  out.test = std::move(test);
  return out;
}

DataSplit subsample(const DataSplit& full, std::size_t n_train,
                    std::uint64_t seed) {
  if (n_train == 0) {
    throw std::invalid_argument("subsample size must be positive");
  }
  if (n_train > full.train.size()) {
    throw std::invalid_argument("subsample size exceeds training set");
  }

  const double ratio =
      static_cast<double>(n_train) / static_cast<double>(full.train.size());
  const auto scaled = [ratio](std::size_t n) {
    return static_cast<std::size_t>(
        std::llround(ratio * static_cast<double>(n)));
  };

  DataSplit out;
  Rng train_rng(StableHash().add(seed).add("train").value());
  Rng valid_rng(StableHash().add(seed).add("valid").value());
  Rng test_rng(StableHash().add(seed).add("test").value());
  out.train = stratified_take(full.train, n_train, train_rng);
  out.valid = stratified_take(full.valid, scaled(full.valid.size()), valid_rng);
  out.test = stratified_take(full.test, scaled(full.test.size()), test_rng);
  return out;
}

}  // namespace augsens
