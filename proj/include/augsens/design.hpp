#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "augsens/augment.hpp"
#include "augsens/model.hpp"

namespace augsens {

// The full experiment grid: |runs| = |classifiers| * |hyperparams| * |vectors|.
// Vectors are pairwise distinct and never all-zero.
struct ExperimentGrid {
  std::vector<ClassifierSpec> classifiers;
  std::vector<HyperParams> hyperparams;
  std::vector<AugVector> vectors;
  std::uint64_t seed_base = 0;
};

// n distinct non-zero vectors, each bit Bernoulli(0.5); duplicates and the
// zero vector are rejected and redrawn. n must not exceed 511.
std::vector<AugVector> generate_vectors(int n, std::uint64_t seed);

// The four grid settings: SGD/20, SGD/15, Adam/20, Adam/15 with the default
// learning rates (0.01 SGD, 0.001 Adam) and batch size 64.
std::vector<HyperParams> default_hyperparams();

struct PlannedRun {
  std::string classifier_id;
  int hp_index = 0;
  HyperParams hp;
  AugVector vector;
  std::uint64_t seed = 0;
};

// Seed tied to the (classifier, hyper-param index, vector) triple, invariant
// to the ordering of the grid lists.
std::uint64_t run_seed(std::uint64_t seed_base, const std::string& classifier_id,
                       int hp_index, const AugVector& vector);

// Cartesian product in (classifier, hyperparams, vector) lexicographic order.
std::vector<PlannedRun> enumerate_runs(const ExperimentGrid& grid);

// Plan file: the grid, the augmentation parameters in force, and every run
// with its derived seed. This is the experiment manifest the runner consumes.
struct Plan {
  ExperimentGrid grid;
  AugmentationParams augmentation;
  std::vector<PlannedRun> runs;
};

void save_plan(const std::filesystem::path& path, const Plan& plan);
Plan load_plan(const std::filesystem::path& path);

}  // namespace augsens
