#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msm/shift_test.hpp"
#include "msm/traversal.hpp"

namespace msm {

/// Config echo carried in every report.
struct ReportConfig {
  int bins = 8;
  double alpha = 0.01;
  double tau = 0.5;
  double epsilon = 1e-3;
  int permutations = 1000;  // B, and sampled-Shapley permutations
  std::uint64_t seed = 0;
  ShapleyMode mode = ShapleyMode::Auto;
  Divergence divergence = Divergence::JensenShannon;
  bool eager_environment = false;
};

struct ReportDocument {
  std::string schema = "msm-report/1";
  std::string map_name;
  ReportConfig config;
  std::optional<DetectResult> detection;
  std::optional<TraceReport> trace;
  std::vector<std::string> warnings;
};

/// Pretty JSON with sorted keys and a trailing newline.
std::string render_json(const ReportDocument& doc);

/// Indented tree, one line per step.
std::string render_text(const ReportDocument& doc);

/// "AQ1 [MLSystem] target=... pattern=AP1.2 top=... share=0.83"
std::string step_line(const TraceStep& step);

}  // namespace msm
