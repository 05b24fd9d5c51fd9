#pragma once

#include <filesystem>

#include "augsens/image.hpp"

namespace augsens {

// IDX container: 4-byte big-endian magic, big-endian 32-bit dimension sizes,
// then row-major unsigned bytes. Image magic 0x00000803 (n, rows, cols),
// label magic 0x00000801 (n). Files may be gzip-compressed (0x1F 0x8B prefix).
//
// Throws FormatError on a bad magic or unsupported geometry, ConsistencyError
// when the image and label counts disagree or a label is out of range, and
// IoError on missing files or truncated payloads.
ImageList load_idx(const std::filesystem::path& images_path,
                   const std::filesystem::path& labels_path);

// Writes the image/label pair in the same layout load_idx reads.
void save_idx(const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path, const ImageList& images,
              bool gzip = false);

}  // namespace augsens
