#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msm/attribution.hpp"
#include "msm/dataset.hpp"
#include "msm/map.hpp"
#include "msm/shift_test.hpp"

namespace msm {

enum class Pattern {
  AP1_1,  // subsystem isolated
  AP1_2,  // isolated at boundary
  AP2_1,  // root cause localized
  AP2_2,  // component localized
  AP2_3,  // localized at boundary
  AP3_1,  // explained externally
  AP3_2,  // cannot determine
  DistributedBranch,
  Negligible,
};

/// "AP1.1", ..., "Distributed", "Negligible".
std::string_view to_string(Pattern p);
/// Long name, e.g. "SubsystemIsolated".
std::string_view describe(Pattern p);

struct PatternMatch {
  Pattern pattern = Pattern::Negligible;
  std::string note;
};

/// Pattern for mass concentrated on `node` in `view`. In the environment
/// view `implicated` is the random variable under test.
PatternMatch pattern_for_node(const SystemMap& map, const ViewKind& view, std::string_view node,
                              std::string_view implicated = {});

/// Classifies one attribution outcome. Environment results use their target
/// as the implicated variable. Throws ViewMismatch if `result` was computed
/// on a different view.
PatternMatch match_pattern(const ViewKind& view, const SystemMap& map, const AttributionResult& result);

struct Verdict {
  enum class Kind { RootCause, Component, External, Undetermined, Negligible };
  Kind kind = Kind::Undetermined;
  std::string node;  // empty for negligible or when nothing is implicated
  std::string note;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};
std::string_view to_string(Verdict::Kind kind);

struct TraceStep;

/// One node carrying attribution mass and where it leads.
struct Branch {
  std::string node;
  Pattern pattern = Pattern::Negligible;
  double share = 0;
  std::string note;
  bool expanded = true;            // false for distributed branches past the bound
  std::optional<Verdict> verdict;  // set on leaves
  std::vector<TraceStep> next;     // continuation steps (routed-to)
};

struct TraceStep {
  int level = 1;  // 1 = AQ1 (system), 2 = AQ2 (subsystem), 3 = AQ3 (environment)
  ViewKind view = ViewKind::ml_system();
  std::string target;
  AttributionResult result;
  Pattern pattern = Pattern::Negligible;
  std::string note;
  std::vector<Branch> branches;
  std::optional<Verdict> verdict;  // set when the step itself is a leaf
};

struct TraceReport {
  std::string alert;
  TraceStep root;
  std::vector<Verdict> verdicts;                   // one per leaf, depth-first
  std::vector<std::string> excluded_environment;   // env nodes without data
  std::vector<std::string> warnings;
};

enum class ShapleyMode { Auto, Exact, Sampled };
std::string_view to_string(ShapleyMode mode);
ShapleyMode shapley_mode_from_string(std::string_view text);

struct TraceConfig {
  int bins = 8;
  double smoothing = 1.0;
  double tau = 0.5;
  double epsilon = 1e-3;
  double branch_cutoff = 0.2;
  ShapleyMode mode = ShapleyMode::Auto;
  int permutations = 1000;  // sampled Shapley permutations
  std::uint64_t seed = 0;
  int max_branches = 3;
  bool eager_environment = false;
  int exact_limit = 12;
  double state_limit = 1e6;
  std::size_t fallback_samples = 100000;
  Divergence divergence = Divergence::JensenShannon;
};

/// Symptom-to-source traversal for one alert: AQ1 on the ML system view,
/// then the routed subsystem (AQ2), then the environment (AQ3) where the
/// patterns call for it.
TraceReport trace(const SystemMap& map, const WindowedDataset& ds, std::string_view alert,
                  const TraceConfig& config = {});

struct Alert {
  std::string node;
  double statistic = 0;
  double p_value = 1;
};

struct DetectOptions {
  double alpha = 0.01;
  int permutations = 1000;
  int bins = 8;
  std::uint64_t seed = 0;
  Divergence divergence = Divergence::JensenShannon;
};

struct DetectResult {
  std::vector<Alert> alerts;          // p <= alpha, by p then name
  std::vector<ShiftTestResult> tests; // every tested node, canonical order
  std::vector<std::string> skipped;   // nodes without enough data
};

/// One permutation test per ML system data node.
DetectResult detect(const SystemMap& map, const WindowedDataset& ds, const DetectOptions& options = {});

std::vector<Alert> detect_alerts(const SystemMap& map, const WindowedDataset& ds, double alpha, int permutations,
                                 std::uint64_t seed);

/// Flattened path of a trace: one entry per step-branch along every branch,
/// depth-first in report order.
struct PathEntry {
  Pattern pattern = Pattern::Negligible;
  std::string view;      // view name of the step
  std::string node;      // concentrated/branch node (empty for negligible)
  std::string route;     // routed-to subsystem name for AP1.x
};
std::vector<PathEntry> pattern_path(const TraceReport& report);

}  // namespace msm
