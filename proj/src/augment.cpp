#include "augsens/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace augsens {
namespace {

constexpr std::array<std::string_view, kNumAugmentations> kNames = {
    "Transpose",      "Blur",        "Downscale",
    "Equalize",       "GaussNoise",  "GaussianBlur",
    "InvertImg",      "ShiftScaleRotate", "RandomRotate90"};

std::uint8_t clamp_pixel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

int pick(const std::vector<int>& choices, Rng& rng) {
  return choices[rng.uniform_int(choices.size())];
}

}  // namespace

std::string_view augmentation_name(AugmentationId id) {
  return kNames[static_cast<int>(id)];
}

AugmentationId augmentation_from_name(std::string_view name) {
  for (int i = 0; i < kNumAugmentations; ++i) {
    if (kNames[i] == name) return static_cast<AugmentationId>(i);
  }
  throw std::invalid_argument("unknown augmentation: " + std::string(name));
}

AugVector AugVector::from_string(std::string_view s) {
  if (s.size() != kNumAugmentations) {
    throw std::invalid_argument("augmentation vector must have 9 characters");
  }
  AugVector v;
  for (int i = 0; i < kNumAugmentations; ++i) {
    if (s[i] != '0' && s[i] != '1') {
      throw std::invalid_argument("augmentation vector must be '0'/'1' only");
    }
    v.bits[i] = s[i] == '1';
  }
  return v;
}

AugVector AugVector::from_ids(std::initializer_list<int> ids) {
  AugVector v;
  for (const int id : ids) {
    if (id < 0 || id >= kNumAugmentations) {
      throw std::invalid_argument("augmentation id out of range");
    }
    v.bits[static_cast<std::size_t>(id)] = true;
  }
  return v;
}

std::string AugVector::to_string() const {
  std::string s(kNumAugmentations, '0');
  for (int i = 0; i < kNumAugmentations; ++i) {
    if (bits[i]) s[i] = '1';
  }
  return s;
}

bool AugVector::any() const {
  return std::any_of(bits.begin(), bits.end(), [](bool b) { return b; });
}

int AugVector::count() const {
  return static_cast<int>(std::count(bits.begin(), bits.end(), true));
}

void AugmentationParams::validate() const {
  for (const double p : probability) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("augmentation probability outside [0,1]");
    }
  }
  for (const auto* sizes : {&blur_kernel_sizes, &gaussian_blur_kernel_sizes}) {
    if (sizes->empty()) {
      throw std::invalid_argument("kernel size list must be nonempty");
    }
    for (const int k : *sizes) {
      if (k < 3 || k % 2 == 0) {
        throw std::invalid_argument("kernel sizes must be odd and >= 3");
      }
    }
  }
  if (!(downscale_factor > 0.0 && downscale_factor <= 1.0)) {
    throw std::invalid_argument("downscale factor must be in (0,1]");
  }
  if (gauss_noise_var_min < 0.0 || gauss_noise_var_max < gauss_noise_var_min) {
    throw std::invalid_argument("invalid noise variance range");
  }
  if (shift_limit < 0.0 || scale_limit < 0.0 || rotate_limit_deg < 0.0) {
    throw std::invalid_argument("affine limits must be nonnegative");
  }
}

// --- deterministic cores ----------------------------------------------------

PixelMatrix transpose_pixels(const PixelMatrix& in) {
  return in.transpose();
}

PixelMatrix box_blur(const PixelMatrix& in, int ksize) {
  const int half = ksize / 2;
  const auto rows = static_cast<int>(in.rows());
  const auto cols = static_cast<int>(in.cols());
  PixelMatrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int r0 = std::max(0, r - half);
    const int r1 = std::min(rows - 1, r + half);
    for (int c = 0; c < cols; ++c) {
      const int c0 = std::max(0, c - half);
      const int c1 = std::min(cols - 1, c + half);
      long sum = 0;
      for (int rr = r0; rr <= r1; ++rr) {
        for (int cc = c0; cc <= c1; ++cc) sum += in(rr, cc);
      }
      const long area = static_cast<long>(r1 - r0 + 1) * (c1 - c0 + 1);
      out(r, c) = clamp_pixel(static_cast<double>(sum) / static_cast<double>(area));
    }
  }
  return out;
}

PixelMatrix downscale_nearest(const PixelMatrix& in, double factor) {
  const auto rows = static_cast<int>(in.rows());
  const auto cols = static_cast<int>(in.cols());
  const int small_rows = std::max(1, static_cast<int>(std::lround(rows * factor)));
  const int small_cols = std::max(1, static_cast<int>(std::lround(cols * factor)));

  PixelMatrix small(small_rows, small_cols);
  for (int r = 0; r < small_rows; ++r) {
    const int sr = std::min(rows - 1, r * rows / small_rows);
    for (int c = 0; c < small_cols; ++c) {
      const int sc = std::min(cols - 1, c * cols / small_cols);
      small(r, c) = in(sr, sc);
    }
  }
  PixelMatrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const int sr = std::min(small_rows - 1, r * small_rows / rows);
    for (int c = 0; c < cols; ++c) {
      const int sc = std::min(small_cols - 1, c * small_cols / cols);
      out(r, c) = small(sr, sc);
    }
  }
  return out;
}

PixelMatrix equalize_histogram(const PixelMatrix& in) {
  std::array<long, 256> hist{};
  const auto n = in.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    ++hist[in.data()[i]];
  }
  std::array<std::uint8_t, 256> lut{};
  long cum = 0;
  for (int v = 0; v < 256; ++v) {
    cum += hist[v];
    lut[v] = clamp_pixel(255.0 * static_cast<double>(cum) /
                         static_cast<double>(n));
  }
  PixelMatrix out(in.rows(), in.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.data()[i] = lut[in.data()[i]];
  }
  return out;
}

PixelMatrix add_gaussian_noise(const PixelMatrix& in, double variance,
                               Rng& rng) {
  const double sigma = std::sqrt(variance);
  PixelMatrix out(in.rows(), in.cols());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
      out(r, c) = clamp_pixel(static_cast<double>(in(r, c)) +
                              sigma * rng.normal());
    }
  }
  return out;
}

PixelMatrix gaussian_blur_kernel(const PixelMatrix& in, int ksize) {
  const int half = ksize / 2;
  const double sigma = 0.3 * ((ksize - 1) * 0.5 - 1.0) + 0.8;
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  std::vector<double> w(static_cast<std::size_t>(ksize));
  for (int i = 0; i < ksize; ++i) {
    const double d = i - half;
    w[static_cast<std::size_t>(i)] = std::exp(-d * d * inv_two_sigma2);
  }

  const auto rows = static_cast<int>(in.rows());
  const auto cols = static_cast<int>(in.cols());
  PixelMatrix out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      double weight = 0.0;
      for (int dr = -half; dr <= half; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= rows) continue;
        for (int dc = -half; dc <= half; ++dc) {
          const int cc = c + dc;
          if (cc < 0 || cc >= cols) continue;
          const double wv = w[static_cast<std::size_t>(dr + half)] *
                            w[static_cast<std::size_t>(dc + half)];
          acc += wv * in(rr, cc);
          weight += wv;
        }
      }
      out(r, c) = clamp_pixel(acc / weight);
    }
  }
  return out;
}

PixelMatrix invert_pixels(const PixelMatrix& in) {
  PixelMatrix out(in.rows(), in.cols());
  for (Eigen::Index i = 0; i < in.size(); ++i) {
    out.data()[i] = static_cast<std::uint8_t>(255 - in.data()[i]);
  }
  return out;
}

PixelMatrix affine_nearest(const PixelMatrix& in, double shift_x_frac,
                           double shift_y_frac, double scale,
                           double angle_deg) {
  const auto rows = static_cast<int>(in.rows());
  const auto cols = static_cast<int>(in.cols());
  const double cy = (rows - 1) / 2.0;
  const double cx = (cols - 1) / 2.0;
  const double ty = shift_y_frac * rows;
  const double tx = shift_x_frac * cols;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);

  PixelMatrix out = PixelMatrix::Zero(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      // Invert the forward map (scale, rotate, shift) for this output pixel.
      const double x = c - cx - tx;
      const double y = r - cy - ty;
      const double sx = (cos_t * x + sin_t * y) / scale;
      const double sy = (-sin_t * x + cos_t * y) / scale;
      const long src_c = std::lround(sx + cx);
      const long src_r = std::lround(sy + cy);
      if (src_r >= 0 && src_r < rows && src_c >= 0 && src_c < cols) {
        out(r, c) = in(src_r, src_c);
      }
    }
  }
  return out;
}

PixelMatrix rotate90(const PixelMatrix& in, int quarter_turns) {
  const int q = ((quarter_turns % 4) + 4) % 4;
  if (q == 0) return in;
  const auto rows = static_cast<int>(in.rows());
  const auto cols = static_cast<int>(in.cols());
  if (q == 2) {
    PixelMatrix out(rows, cols);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) out(r, c) = in(rows - 1 - r, cols - 1 - c);
    }
    return out;
  }
  PixelMatrix out(cols, rows);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (q == 1) {
        out(cols - 1 - c, r) = in(r, c);  // counterclockwise
      } else {
        out(c, rows - 1 - r) = in(r, c);
      }
    }
  }
  return out;
}

// --- stochastic kernels -----------------------------------------------------

Image transpose(const Image& in, const AugmentationParams&, Rng&) {
  return {transpose_pixels(in.pixels), in.label};
}

Image blur(const Image& in, const AugmentationParams& p, Rng& rng) {
  return {box_blur(in.pixels, pick(p.blur_kernel_sizes, rng)), in.label};
}

Image downscale(const Image& in, const AugmentationParams& p, Rng&) {
  return {downscale_nearest(in.pixels, p.downscale_factor), in.label};
}

Image equalize(const Image& in, const AugmentationParams&, Rng&) {
  return {equalize_histogram(in.pixels), in.label};
}

Image gauss_noise(const Image& in, const AugmentationParams& p, Rng& rng) {
  const double variance = rng.uniform(p.gauss_noise_var_min, p.gauss_noise_var_max);
  return {add_gaussian_noise(in.pixels, variance, rng), in.label};
}

Image gaussian_blur(const Image& in, const AugmentationParams& p, Rng& rng) {
  return {gaussian_blur_kernel(in.pixels, pick(p.gaussian_blur_kernel_sizes, rng)),
          in.label};
}

Image invert(const Image& in, const AugmentationParams&, Rng&) {
  return {invert_pixels(in.pixels), in.label};
}

Image shift_scale_rotate(const Image& in, const AugmentationParams& p,
                         Rng& rng) {
  const double shift_x = rng.uniform(-p.shift_limit, p.shift_limit);
  const double shift_y = rng.uniform(-p.shift_limit, p.shift_limit);
  const double scale = rng.uniform(1.0 - p.scale_limit, 1.0 + p.scale_limit);
  const double angle = rng.uniform(-p.rotate_limit_deg, p.rotate_limit_deg);
  return {affine_nearest(in.pixels, shift_x, shift_y, scale, angle), in.label};
}

Image random_rotate90(const Image& in, const AugmentationParams&, Rng& rng) {
  const int q = static_cast<int>(rng.uniform_int(4));
  return {rotate90(in.pixels, q), in.label};
}

Image apply_kernel(const Image& in, AugmentationId id,
                   const AugmentationParams& p, Rng& rng) {
  switch (id) {
    case AugmentationId::kTranspose:        return transpose(in, p, rng);
    case AugmentationId::kBlur:             return blur(in, p, rng);
    case AugmentationId::kDownscale:        return downscale(in, p, rng);
    case AugmentationId::kEqualize:         return equalize(in, p, rng);
    case AugmentationId::kGaussNoise:       return gauss_noise(in, p, rng);
    case AugmentationId::kGaussianBlur:     return gaussian_blur(in, p, rng);
    case AugmentationId::kInvertImg:        return invert(in, p, rng);
    case AugmentationId::kShiftScaleRotate: return shift_scale_rotate(in, p, rng);
    case AugmentationId::kRandomRotate90:   return random_rotate90(in, p, rng);
  }
  throw std::invalid_argument("unknown augmentation id");
}

Image apply_one(const Image& in, AugmentationId id, const AugmentationParams& p,
                Rng& rng) {
  const double gate = rng.uniform();
  if (!(gate < p.probability[static_cast<int>(id)])) {
    return in;
  }
  return apply_kernel(in, id, p, rng);
}

Image apply_vector(const Image& in, const AugVector& v,
                   const AugmentationParams& p, Rng& rng) {
  Image out = in;
  for (int i = 0; i < kNumAugmentations; ++i) {
    if (v.bits[i]) {
      out = apply_one(out, static_cast<AugmentationId>(i), p, rng);
    }
  }
  return out;
}

}  // namespace augsens
