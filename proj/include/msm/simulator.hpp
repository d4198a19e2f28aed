#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "msm/dataset.hpp"
#include "msm/map.hpp"
#include "msm/traversal.hpp"

namespace msm {

/// Constants of the churn structural model. The `*_shift` fields are the
/// current-window values used by the scenario that touches them.
struct SimParams {
  // env
  double p_young = 0.5, p_adult = 0.3;  // senior takes the rest
  double base_young = 5, base_adult = 3, base_senior = 2;
  double qos_mean = 1.0, qos_sd = 0.1;
  double eps_mean = 0.0, eps_sd = 0.2;
  // pipeline
  double event_rate = 7.0;
  double parse_quality = 1.0;
  double feature_bias = 0.0;
  bool fresh = true;
  // serving (v1 and v2 coefficients)
  double v1_a0 = 2.0, v1_a1 = -0.8, v1_a2 = 0.5;
  double v2_a0 = 1.0, v2_a1 = -0.5, v2_a2 = 0.9;
  bool model_v2 = false;
  // application
  double outreach_threshold = 0.6;
  double offer_threshold = 0.5;
  // promo ranking
  double r0 = -1.0, r_score = 2.0, r_feature = 0.3;

  // scenario targets
  double s1_outreach_threshold = 0.4;
  double s2_parse_quality = 0.7;
  double s3_feature_bias = 0.5;
  double s4_qos_mean = 0.6;
  double s5_eps_mean = 0.5;
};

struct ScenarioConfig {
  std::string scenario = "S0";  // S0..S6
  std::size_t n = 5000;         // rows per window
  std::uint64_t seed = 0;
  SimParams params;
};

/// Scenario ids in order.
const std::vector<std::string>& scenario_ids();

/// Current-window parameters for a scenario. Throws UnknownScenario.
SimParams scenario_params(std::string_view scenario, const SimParams& base);

/// `.msm` text of the churn example map.
std::string_view churn_map_text();
SystemMap churn_map();

struct Simulation {
  SystemMap map;
  std::string csv;  // header plus 2n rows, ref first
  WindowedDataset dataset;
};

/// Deterministic given the config. The reference window depends only on
/// (seed, n, params), never on the scenario.
Simulation generate(const ScenarioConfig& config);

/// Expected pattern path for a scenario. `key` is the routed subsystem for
/// AP1.x and the concentrated node otherwise.
struct ExpectedStep {
  Pattern pattern;
  std::string key;
};
std::vector<ExpectedStep> expected_patterns(std::string_view scenario);

/// The alert the expected path is traced from.
std::string designated_alert(std::string_view scenario);

/// Same keying as ExpectedStep, for comparing a trace to the table.
std::vector<ExpectedStep> observed_patterns(const TraceReport& report);

std::string format_path(const std::vector<ExpectedStep>& path);

}  // namespace msm
