#include "augsens/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "augsens/rng.hpp"

namespace augsens {
namespace {

constexpr int kDiskRadius = 5;
constexpr double kNoiseSigma = 45.0;

// Class c sits on a 3x4 location grid.
void disk_center(int label, int& row, int& col) {
  row = 5 + 9 * (label / 4);
  col = 4 + 7 * (label % 4);
}

}  // namespace

ImageList make_synthetic_images(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  ImageList images(n);
  for (std::size_t i = 0; i < n; ++i) {
    Image& img = images[i];
    img.label = static_cast<int>(i % kNumClasses);
    img.pixels = PixelMatrix::Zero(kImageSide, kImageSide);

    int cy = 0;
    int cx = 0;
    disk_center(img.label, cy, cx);
    cy += static_cast<int>(rng.uniform_int(5)) - 2;
    cx += static_cast<int>(rng.uniform_int(5)) - 2;

    for (int r = 0; r < kImageSide; ++r) {
      for (int c = 0; c < kImageSide; ++c) {
        const int dr = r - cy;
        const int dc = c - cx;
        double v = 0.0;
        if (dr * dr + dc * dc <= kDiskRadius * kDiskRadius) {
          v = 150.0 + 10.0 * (img.label % 4);
        }
        v += kNoiseSigma * rng.normal();
        img.pixels(r, c) = static_cast<std::uint8_t>(
            std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }
  return images;
}

}  // namespace augsens
