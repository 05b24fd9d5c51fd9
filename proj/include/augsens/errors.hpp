#pragma once

#include <stdexcept>
#include <string>

namespace augsens {

// File does not match the expected binary/text layout.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Contents are well-formed but internally contradictory (count mismatch,
// duplicate key, missing grid cell, ...).
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite training loss. Carries the epoch at which it was detected.
struct TrainingDiverged : std::runtime_error {
  int epoch;
  TrainingDiverged(int epoch_index, const std::string& what)
      : std::runtime_error(what), epoch(epoch_index) {}
};

}  // namespace augsens
