#pragma once

#include <cstdint>

#include "augsens/image.hpp"

namespace augsens {

// Deterministic 10-class stand-in dataset in the pipeline's native image
// shape: each class is a bright disk at a class-specific location with
// per-sample jitter and additive Gaussian pixel noise. Classes are balanced
// (label = index mod 10). Intended for demos and the test suites; real IDX
// datasets plug into the same pipeline.
ImageList make_synthetic_images(std::size_t n, std::uint64_t seed);

}  // namespace augsens
