#include "augsens/idx.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>
#include <string>

#include "augsens/errors.hpp"

namespace augsens {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

bool is_gzip(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in,
                                 const std::string& name) {
  z_stream strm{};
  if (inflateInit2(&strm, 15 + 16) != Z_OK) {
    throw IoError("zlib init failed for " + name);
  }
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  strm.next_in = const_cast<Bytef*>(in.data());
  strm.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    strm.next_out = buf;
    strm.avail_out = sizeof(buf);
    rc = inflate(&strm, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&strm);
      throw IoError("gzip decompression failed for " + name);
    }
    out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
  }
  inflateEnd(&strm);
  return out;
}

std::vector<std::uint8_t> gzip_bytes(const std::vector<std::uint8_t>& in) {
  z_stream strm{};
  if (deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw IoError("zlib deflate init failed");
  }
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  strm.next_in = const_cast<Bytef*>(in.data());
  strm.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    strm.next_out = buf;
    strm.avail_out = sizeof(buf);
    rc = deflate(&strm, Z_FINISH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      deflateEnd(&strm);
      throw IoError("gzip compression failed");
    }
    out.insert(out.end(), buf, buf + (sizeof(buf) - strm.avail_out));
  }
  deflateEnd(&strm);
  return out;
}

std::uint32_t read_u32_be(const std::vector<std::uint8_t>& bytes,
                          std::size_t offset, const std::string& name) {
  if (offset + 4 > bytes.size()) {
    throw IoError("truncated header in " + name);
  }
  return (static_cast<std::uint32_t>(bytes[offset]) << 24) |
         (static_cast<std::uint32_t>(bytes[offset + 1]) << 16) |
         (static_cast<std::uint32_t>(bytes[offset + 2]) << 8) |
         static_cast<std::uint32_t>(bytes[offset + 3]);
}

void append_u32_be(std::vector<std::uint8_t>& bytes, std::uint32_t v) {
  bytes.push_back(static_cast<std::uint8_t>(v >> 24));
  bytes.push_back(static_cast<std::uint8_t>(v >> 16));
  bytes.push_back(static_cast<std::uint8_t>(v >> 8));
  bytes.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> load_payload(const std::filesystem::path& path) {
  auto bytes = read_file(path);
  if (is_gzip(bytes)) {
    return gunzip(bytes, path.string());
  }
  return bytes;
}

}  // namespace

ImageList load_idx(const std::filesystem::path& images_path,
                   const std::filesystem::path& labels_path) {
  const auto img = load_payload(images_path);
  const auto lab = load_payload(labels_path);
  const std::string img_name = images_path.string();
  const std::string lab_name = labels_path.string();

  if (read_u32_be(img, 0, img_name) != kImageMagic) {
    throw FormatError("bad image magic in " + img_name);
  }
  if (read_u32_be(lab, 0, lab_name) != kLabelMagic) {
    throw FormatError("bad label magic in " + lab_name);
  }

  const std::uint32_t n_images = read_u32_be(img, 4, img_name);
  const std::uint32_t rows = read_u32_be(img, 8, img_name);
  const std::uint32_t cols = read_u32_be(img, 12, img_name);
  const std::uint32_t n_labels = read_u32_be(lab, 4, lab_name);

  if (n_images != n_labels) {
    throw ConsistencyError("image count " + std::to_string(n_images) +
                           " does not match label count " +
                           std::to_string(n_labels));
  }
  if (rows != kImageSide || cols != kImageSide) {
    throw FormatError("unsupported image geometry " + std::to_string(rows) +
                      "x" + std::to_string(cols) + " in " + img_name);
  }
  const std::size_t pixel_bytes =
      static_cast<std::size_t>(n_images) * rows * cols;
  if (img.size() < 16 + pixel_bytes) {
    throw IoError("truncated pixel payload in " + img_name);
  }
  if (lab.size() < 8 + n_images) {
    throw IoError("truncated label payload in " + lab_name);
  }

  ImageList images(n_images);
  const std::uint8_t* px = img.data() + 16;
  for (std::uint32_t i = 0; i < n_images; ++i) {
    const int label = lab[8 + i];
    if (label >= kNumClasses) {
      throw ConsistencyError("label " + std::to_string(label) +
                             " out of range at index " + std::to_string(i));
    }
    images[i].label = label;
    images[i].pixels.resize(rows, cols);
    std::memcpy(images[i].pixels.data(), px + static_cast<std::size_t>(i) * rows * cols,
                static_cast<std::size_t>(rows) * cols);
  }
  return images;
}

void save_idx(const std::filesystem::path& images_path,
              const std::filesystem::path& labels_path, const ImageList& images,
              bool gzip) {
  std::vector<std::uint8_t> img;
  std::vector<std::uint8_t> lab;
  append_u32_be(img, kImageMagic);
  append_u32_be(img, static_cast<std::uint32_t>(images.size()));
  append_u32_be(img, kImageSide);
  append_u32_be(img, kImageSide);
  append_u32_be(lab, kLabelMagic);
  append_u32_be(lab, static_cast<std::uint32_t>(images.size()));

  for (const Image& image : images) {
    if (image.pixels.rows() != kImageSide || image.pixels.cols() != kImageSide) {
      throw ConsistencyError("save_idx requires 28x28 images");
    }
    const std::uint8_t* p = image.pixels.data();
    img.insert(img.end(), p, p + kImageSide * kImageSide);
    lab.push_back(static_cast<std::uint8_t>(image.label));
  }

  if (gzip) {
    img = gzip_bytes(img);
    lab = gzip_bytes(lab);
  }

  for (const auto& [path, bytes] :
       {std::pair{images_path, &img}, std::pair{labels_path, &lab}}) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes->data()),
              static_cast<std::streamsize>(bytes->size()));
    if (!out) {
      throw IoError("short write to " + path.string());
    }
  }
}

}  // namespace augsens
