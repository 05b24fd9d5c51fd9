#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "augsens/commands.hpp"
#include "augsens/csv.hpp"
#include "augsens/errors.hpp"
#include "augsens/metrics.hpp"

namespace augsens {
namespace {

struct AnalysisMeta {
  std::string metric;
  std::string reliability_mode;
  double sensitivity_threshold = 0.2;
  int top_n = 3;
  std::vector<std::string> classifiers;
  std::vector<std::string> hp_descriptors;
};

AnalysisMeta load_meta(const std::filesystem::path& dir) {
  std::ifstream in(dir / "analysis.json");
  if (!in) throw IoError("cannot open " + (dir / "analysis.json").string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("analysis.json: ") + e.what());
  }
  AnalysisMeta meta;
  meta.metric = j.at("metric").get<std::string>();
  meta.reliability_mode = j.at("reliability_mode").get<std::string>();
  meta.sensitivity_threshold = j.at("sensitivity_threshold").get<double>();
  meta.top_n = j.at("top_n").get<int>();
  meta.classifiers = j.at("classifiers").get<std::vector<std::string>>();
  meta.hp_descriptors = j.at("hp_descriptors").get<std::vector<std::string>>();
  return meta;
}

struct ParsedMetrics {
  std::vector<std::string> names;  // by augmentation id
  std::vector<std::vector<double>> variances;
  std::vector<double> sensitivity, consistency, influence;
  std::vector<double> reliability_table, reliability_equation;
  std::vector<bool> sensitive, reliable;
};

ParsedMetrics load_metrics(const std::filesystem::path& dir, std::size_t K) {
  const auto rows = read_csv(dir / "metrics.csv");
  if (rows.size() != kNumAugmentations + 1) {
    throw FormatError("metrics.csv must hold 9 augmentation rows");
  }
  ParsedMetrics m;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    if (f.size() != 2 + K + 7) {
      throw FormatError("metrics.csv row has unexpected column count");
    }
    m.names.push_back(f[1]);
    std::vector<double> vars;
    for (std::size_t k = 0; k < K; ++k) vars.push_back(std::stod(f[2 + k]));
    m.variances.push_back(std::move(vars));
    std::size_t c = 2 + K;
    m.sensitivity.push_back(std::stod(f[c++]));
    m.consistency.push_back(std::stod(f[c++]));
    m.influence.push_back(std::stod(f[c++]));
    m.reliability_table.push_back(std::stod(f[c++]));
    m.reliability_equation.push_back(std::stod(f[c++]));
    m.sensitive.push_back(f[c++] == "true");
    m.reliable.push_back(f[c++] == "true");
  }
  return m;
}

std::string label(const ParsedMetrics& m, std::size_t i) {
  return m.names[i] + " (" + std::to_string(i) + ")";
}

std::string join_labels(const ParsedMetrics& m,
                        const std::vector<std::size_t>& ids) {
  if (ids.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) s += ", ";
    s += label(m, ids[i]);
  }
  return s;
}

// Splits one tensor CSV (columns "classifier|hp") into per-classifier series
// files with one column per hyper-param.
void write_series_files(const std::filesystem::path& dir,
                        const AnalysisMeta& meta, const std::string& metric,
                        std::ostream& log) {
  const auto rows = read_csv(dir / ("tensor_" + metric + ".csv"));
  if (rows.empty()) throw FormatError("tensor_" + metric + ".csv is empty");
  const auto& header = rows[0];

  for (const std::string& cls : meta.classifiers) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 2; c < header.size(); ++c) {
      if (header[c].starts_with(cls + "|")) cols.push_back(c);
    }
    const auto path = dir / ("coefficients_" + cls + "_" + metric + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << "aug_id,aug_name";
    for (const std::size_t c : cols) {
      out << "," << header[c].substr(cls.size() + 1);
    }
    out << "\n";
    for (std::size_t r = 1; r < rows.size(); ++r) {
      out << rows[r][0] << "," << rows[r][1];
      for (const std::size_t c : cols) out << "," << rows[r][c];
      out << "\n";
    }
    log << "wrote " << path.string() << "\n";
  }
}

std::vector<std::size_t> sorted_ids(const std::vector<double>& score,
                                    bool descending) {
  std::vector<std::size_t> ids(score.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) {
      return descending ? score[a] > score[b] : score[a] < score[b];
    }
    return a < b;
  });
  return ids;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

int cmd_report(const std::filesystem::path& analysis_dir, std::ostream& out) {
  try {
    const AnalysisMeta meta = load_meta(analysis_dir);
    const ParsedMetrics m = load_metrics(analysis_dir, meta.classifiers.size());

    write_series_files(analysis_dir, meta, "accuracy", out);
    write_series_files(analysis_dir, meta, "loss", out);

    {
      const auto intercepts = read_csv(analysis_dir / "intercepts.csv");
      const auto path = analysis_dir / "intercept_series.csv";
      std::ofstream iout(path, std::ios::trunc);
      if (!iout) throw IoError("cannot write " + path.string());
      for (const auto& row : intercepts) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i > 0) iout << ",";
          iout << row[i];
        }
        iout << "\n";
      }
      out << "wrote " << path.string() << "\n";
    }

    std::vector<std::size_t> sensitive_ids, insensitive_ids, reliable_ids;
    for (std::size_t i = 0; i < kNumAugmentations; ++i) {
      (m.sensitive[i] ? sensitive_ids : insensitive_ids).push_back(i);
      if (m.reliable[i]) reliable_ids.push_back(i);
    }
    const auto by_sens = sorted_ids(m.sensitivity, true);
    const std::vector<std::size_t> most(by_sens.begin(), by_sens.begin() + 3);
    std::vector<std::size_t> least(by_sens.end() - 3, by_sens.end());
    std::reverse(least.begin(), least.end());
    const auto by_rel = sorted_ids(m.reliability_table, true);

    const auto report_path = analysis_dir / "report.md";
    std::ofstream md(report_path, std::ios::trunc);
    if (!md) throw IoError("cannot write " + report_path.string());

    md << "# Augmentation sensitivity report\n\n";
    md << "Metric analyzed: **" << meta.metric << "**. Classifiers: ";
    for (std::size_t k = 0; k < meta.classifiers.size(); ++k) {
      md << (k ? ", " : "") << meta.classifiers[k];
    }
    md << ". Hyper-param settings: ";
    for (std::size_t l = 0; l < meta.hp_descriptors.size(); ++l) {
      md << (l ? ", " : "") << meta.hp_descriptors[l];
    }
    md << ".\n\n";

    md << "## Scores\n\n";
    md << "| id | augmentation |";
    for (std::size_t k = 0; k < meta.classifiers.size(); ++k) {
      md << " var m" << (k + 1) << " |";
    }
    md << " sensitivity | consistency | influence | reliability (table) | "
          "reliability (equation) | sensitive | reliable |\n";
    md << "|---|---|";
    for (std::size_t k = 0; k < meta.classifiers.size() + 7; ++k) md << "---|";
    md << "\n";
    for (std::size_t i = 0; i < kNumAugmentations; ++i) {
      md << "| " << i << " | " << m.names[i] << " |";
      for (const double v : m.variances[i]) md << " " << fmt(v) << " |";
      md << " " << fmt(m.sensitivity[i]) << " | " << fmt(m.consistency[i])
         << " | " << fmt(m.influence[i]) << " | " << fmt(m.reliability_table[i])
         << " | " << fmt(m.reliability_equation[i]) << " | "
         << (m.sensitive[i] ? "yes" : "no") << " | "
         << (m.reliable[i] ? "yes" : "no") << " |\n";
    }

    md << "\n## Classification\n\n";
    md << "Sensitivity threshold: " << fmt(meta.sensitivity_threshold)
       << " (sensitive when sensitivity >= threshold).\n\n";
    md << "- Sensitive: " << join_labels(m, sensitive_ids) << "\n";
    md << "- Non-sensitive: " << join_labels(m, insensitive_ids) << "\n";
    md << "- Most sensitive (top 3 by sensitivity): " << join_labels(m, most)
       << "\n";
    md << "- Least sensitive (bottom 3 by sensitivity): "
       << join_labels(m, least) << "\n\n";
    md << "Reliable augmentations (top " << meta.top_n
       << " positive reliability, " << meta.reliability_mode << " mode): "
       << join_labels(m, reliable_ids) << "\n";
    md << "Reliability ranking (table mode): " << join_labels(m, by_rel)
       << "\n\n";

    md << "## Reliability conventions\n\n";
    md << "Two conventions are computed for every augmentation and both appear "
          "in the table above: `table` multiplies sensitivity by influence; "
          "`equation` multiplies consistency by influence. The two columns "
          "generally differ";
    std::size_t sign_flips = 0;
    for (std::size_t i = 0; i < kNumAugmentations; ++i) {
      if ((m.reliability_table[i] > 0) != (m.reliability_equation[i] > 0)) {
        ++sign_flips;
      }
    }
    md << " in magnitude (sign flips: " << sign_flips << " of 9).\n\n";

    md << "## Plot data\n\n";
    md << "- `coefficients_<classifier>_<metric>.csv`: one row per "
          "augmentation, one column per hyper-param setting.\n";
    md << "- `intercept_series.csv`: one row per (classifier, metric), one "
          "column per hyper-param setting.\n";

    out << "report written to " << report_path.string() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    out << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace augsens
