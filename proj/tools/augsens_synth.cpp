// Generates a synthetic IDX dataset pair (train + test) for demo runs and
// smoke tests when no real dataset is on disk.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "augsens/idx.hpp"
#include "augsens/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic IDX dataset generator"};

  std::string out_dir = "data";
  std::size_t n_train = 60000;
  std::size_t n_test = 10000;
  std::uint64_t seed = 42;
  bool gzip = false;

  app.add_option("--out", out_dir, "output directory");
  app.add_option("--train", n_train, "training pool size");
  app.add_option("--test", n_test, "test set size");
  app.add_option("--seed", seed, "generator seed");
  app.add_flag("--gzip", gzip, "write gzip-compressed files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const std::string suffix = gzip ? ".gz" : "";
    const auto train = augsens::make_synthetic_images(n_train, seed);
    const auto test = augsens::make_synthetic_images(n_test, seed + 1);
    augsens::save_idx(fs::path(out_dir) / ("train-images-idx3-ubyte" + suffix),
                      fs::path(out_dir) / ("train-labels-idx1-ubyte" + suffix),
                      train, gzip);
    augsens::save_idx(fs::path(out_dir) / ("t10k-images-idx3-ubyte" + suffix),
                      fs::path(out_dir) / ("t10k-labels-idx1-ubyte" + suffix),
                      test, gzip);
    std::cout << "wrote " << n_train << " train + " << n_test << " test images to "
              << out_dir << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
