#pragma once

#include <array>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "augsens/image.hpp"
#include "augsens/rng.hpp"

namespace augsens {

inline constexpr int kNumAugmentations = 9;

// Fixed index mapping, stable across the whole pipeline (plans, stores,
// reports all use these indices).
enum class AugmentationId : int {
  kTranspose = 0,
  kBlur = 1,
  kDownscale = 2,
  kEqualize = 3,
  kGaussNoise = 4,
  kGaussianBlur = 5,
  kInvertImg = 6,
  kShiftScaleRotate = 7,
  kRandomRotate90 = 8,
};

std::string_view augmentation_name(AugmentationId id);
AugmentationId augmentation_from_name(std::string_view name);

// 9-bit mask selecting which augmentations apply. Text form is a 9-character
// '0'/'1' string with index 0 leftmost.
struct AugVector {
  std::array<bool, kNumAugmentations> bits{};

  static AugVector from_string(std::string_view s);
  static AugVector from_ids(std::initializer_list<int> ids);

  std::string to_string() const;
  bool test(AugmentationId id) const { return bits[static_cast<int>(id)]; }
  bool any() const;
  int count() const;

  bool operator==(const AugVector&) const = default;
  auto operator<=>(const AugVector&) const = default;
};

// Application probabilities and magnitude ranges for every kernel. The
// defaults are frozen here and recorded verbatim in each experiment plan.
struct AugmentationParams {
  // Probability of applying each augmentation, indexed by AugmentationId.
  std::array<double, kNumAugmentations> probability{0.5, 0.5, 0.5, 0.5, 0.5,
                                                    0.5, 0.5, 0.8, 0.5};
  std::vector<int> blur_kernel_sizes{3, 5, 7};
  std::vector<int> gaussian_blur_kernel_sizes{3, 5, 7};
  double downscale_factor = 0.25;
  double gauss_noise_var_min = 10.0;  // gray-level^2
  double gauss_noise_var_max = 50.0;
  double shift_limit = 0.0625;    // fraction of the image side
  double scale_limit = 0.1;       // scale drawn from [1-limit, 1+limit]
  double rotate_limit_deg = 15.0;

  void validate() const;  // throws std::invalid_argument
};

// --- deterministic cores (size-generic, total on valid images) -------------

PixelMatrix transpose_pixels(const PixelMatrix& in);
// Mean over the kxk window clipped to the frame; k odd.
PixelMatrix box_blur(const PixelMatrix& in, int ksize);
// Nearest-neighbor reduce to round(side*factor), then nearest-neighbor
// expand back to the original frame.
PixelMatrix downscale_nearest(const PixelMatrix& in, double factor);
// Cumulative-histogram remap: lut(v) = round(255 * cdf(v)).
PixelMatrix equalize_histogram(const PixelMatrix& in);
// Additive zero-mean Gaussian noise with the given variance, clamped.
PixelMatrix add_gaussian_noise(const PixelMatrix& in, double variance, Rng& rng);
// Gaussian window (sigma = 0.3*((k-1)*0.5 - 1) + 0.8) renormalized over the
// in-frame support; k odd.
PixelMatrix gaussian_blur_kernel(const PixelMatrix& in, int ksize);
PixelMatrix invert_pixels(const PixelMatrix& in);
// Affine resample about the image center: scale, rotate, then shift by a
// fraction of the side. Nearest-neighbor, zero border fill.
PixelMatrix affine_nearest(const PixelMatrix& in, double shift_x_frac,
                           double shift_y_frac, double scale, double angle_deg);
// Counterclockwise quarter turns (any integer, reduced mod 4).
PixelMatrix rotate90(const PixelMatrix& in, int quarter_turns);

// --- stochastic kernels (draw magnitudes from rng, always transform) -------

Image transpose(const Image& in, const AugmentationParams& p, Rng& rng);
Image blur(const Image& in, const AugmentationParams& p, Rng& rng);
Image downscale(const Image& in, const AugmentationParams& p, Rng& rng);
Image equalize(const Image& in, const AugmentationParams& p, Rng& rng);
Image gauss_noise(const Image& in, const AugmentationParams& p, Rng& rng);
Image gaussian_blur(const Image& in, const AugmentationParams& p, Rng& rng);
Image invert(const Image& in, const AugmentationParams& p, Rng& rng);
Image shift_scale_rotate(const Image& in, const AugmentationParams& p, Rng& rng);
Image random_rotate90(const Image& in, const AugmentationParams& p, Rng& rng);

Image apply_kernel(const Image& in, AugmentationId id,
                   const AugmentationParams& p, Rng& rng);

// Gates the kernel behind its application probability: with probability
// 1 - p the input is returned unchanged. The gate draw is always consumed.
Image apply_one(const Image& in, AugmentationId id, const AugmentationParams& p,
                Rng& rng);

// Applies the selected augmentations in ascending AugmentationId order,
// chaining outputs. The all-zero vector returns the input unchanged.
Image apply_vector(const Image& in, const AugVector& v,
                   const AugmentationParams& p, Rng& rng);

}  // namespace augsens
