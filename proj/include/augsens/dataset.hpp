#pragma once

#include <cstdint>

#include "augsens/image.hpp"

namespace augsens {

// Disjoint train/valid/test partitions. Datasets are immutable once built
// and safe to share across concurrent readers.
struct DataSplit {
  ImageList train;
  ImageList valid;
  ImageList test;
};

// Seeded shuffle of the pool followed by an 85/15 train/valid partition
// (51000/9000 at the full 60000-image scale). The test set passes through
// unchanged. Pools smaller than 2 images are rejected.
DataSplit split(ImageList train_pool, ImageList test, std::uint64_t seed);

// Deterministic stratified reduction to n_train training images: equal
// per-class counts with the remainder assigned to ascending class ids.
// Validation and test sets shrink by the same ratio.
DataSplit subsample(const DataSplit& full, std::size_t n_train,
                    std::uint64_t seed);

}  // namespace augsens
