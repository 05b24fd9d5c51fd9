#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace augsens {

// Minimal comma-separated reader for the pipeline's own output files
// (no quoting; fields never contain commas). First row is the header.
std::vector<std::vector<std::string>> read_csv(
    const std::filesystem::path& path);

}  // namespace augsens
