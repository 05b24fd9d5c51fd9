#pragma once

#include <filesystem>
#include <iosfwd>

#include "augsens/config.hpp"

namespace augsens {

// Command implementations behind the CLI. Each returns a process exit code:
// 0 success, 1 runtime failure, 2 usage/config error. Progress and
// diagnostics go to `out`.

int cmd_design(const Config& config, const std::filesystem::path& plan_path,
               std::ostream& out);

int cmd_run(const Config& config, const std::filesystem::path& plan_path,
            const std::filesystem::path& store_path, std::ostream& out);

int cmd_analyze(const Config& config, const std::filesystem::path& plan_path,
                const std::filesystem::path& store_path,
                const std::filesystem::path& out_dir, std::ostream& out);

// Reads an analyze output directory and writes report.md plus the
// per-classifier coefficient and intercept series files next to it.
int cmd_report(const std::filesystem::path& analysis_dir, std::ostream& out);

}  // namespace augsens
