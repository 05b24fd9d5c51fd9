#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace augsens {

inline constexpr int kImageSide = 28;
inline constexpr int kNumClasses = 10;

// Row-major so the in-memory layout matches the on-disk pixel order.
using PixelMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Grayscale image with its class label. Pipeline images are 28x28; the
// augmentation kernels accept any rectangular size.
struct Image {
  PixelMatrix pixels;
  int label = 0;

  bool operator==(const Image& other) const {
    return label == other.label && pixels.rows() == other.pixels.rows() &&
           pixels.cols() == other.pixels.cols() && pixels == other.pixels;
  }
};

using ImageList = std::vector<Image>;

}  // namespace augsens
