#include "msm/simulator.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "msm/format.hpp"
#include "msm/rng.hpp"

namespace msm {

namespace {

constexpr std::string_view kChurnMap = R"MSM(map churn

view system
  data activity_features
  data demographic_features
  data churn_score
  data outreach_decision
  data promo_ranking
  data promotion_sent
  edge activity_features -> churn_score
  edge demographic_features -> churn_score
  edge churn_score -> outreach_decision
  edge churn_score -> promo_ranking
  edge activity_features -> promo_ranking
  edge outreach_decision -> promotion_sent
  edge promo_ranking -> promotion_sent
  actuate outreach_decision -> env.promotion_received

# raw activity logs -> daily counts -> features
view subsystem pipeline
  modulator parse_quality
  modulator data_freshness
  data activity_events boundary
  data daily_counts
  data activity_features
  edge parse_quality -> activity_events
  edge activity_events -> daily_counts
  edge daily_counts -> activity_features
  edge data_freshness -> activity_features
  equiv activity_features = system.activity_features

view subsystem serving
  modulator model_version
  data churn_score_out
  edge model_version -> churn_score_out
  equiv churn_score_out = system.churn_score

view subsystem application
  modulator outreach_policy
  data outreach
  edge outreach_policy -> outreach
  equiv outreach = system.outreach_decision

view subsystem serving2
  modulator ranker_version
  data promo_ranking
  edge ranker_version -> promo_ranking
  equiv promo_ranking = system.promo_ranking

view subsystem application2
  modulator offer_threshold
  data promotion_sent
  edge offer_threshold -> promotion_sent
  equiv promotion_sent = system.promotion_sent

view environment
  random user_demographics
  random quality_of_service
  random user_activity
  random promotion_received
  edge user_demographics -> user_activity
  edge quality_of_service -> user_activity
  measure user_activity -> system.activity_features
  measure user_demographics -> system.demographic_features
)MSM";

}  // namespace

std::string_view churn_map_text() { return kChurnMap; }

SystemMap churn_map() { return parse_map(kChurnMap); }

const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids = {"S0", "S1", "S2", "S3", "S4", "S5", "S6"};
  return ids;
}

SimParams scenario_params(std::string_view scenario, const SimParams& base) {
  SimParams p = base;
  if (scenario == "S0") return p;
  if (scenario == "S1") {
    p.outreach_threshold = base.s1_outreach_threshold;
  } else if (scenario == "S2") {
    p.parse_quality = base.s2_parse_quality;
  } else if (scenario == "S3") {
    p.feature_bias = base.s3_feature_bias;
  } else if (scenario == "S4") {
    p.qos_mean = base.s4_qos_mean;
  } else if (scenario == "S5") {
    p.eps_mean = base.s5_eps_mean;
  } else if (scenario == "S6") {
    p.model_v2 = true;
  } else {
    throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + std::string(scenario) + "'");
  }
  return p;
}

namespace {

double normal(Rng& rng, double mean, double sd) {
  // Box-Muller on our own uniforms so output does not depend on the
  // standard library's distribution implementations.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

long poisson(Rng& rng, double lambda) {
  long total = 0;
  while (lambda > 0) {
    const double chunk = std::min(lambda, 500.0);
    lambda -= chunk;
    const double limit = std::exp(-chunk);
    double prod = uniform01(rng);
    while (prod > limit) {
      ++total;
      prod *= uniform01(rng);
    }
  }
  return total;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::string num(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

struct Activity {
  int demographic = 0;  // 0 young, 1 adult, 2 senior
  double qos = 0;
  long events = 0;
};

Activity draw_activity(Rng& rng, const SimParams& p) {
  Activity a;
  const double u = uniform01(rng);
  a.demographic = u < p.p_young ? 0 : (u < p.p_young + p.p_adult ? 1 : 2);
  do {
    a.qos = normal(rng, p.qos_mean, p.qos_sd);
  } while (a.qos < 0);
  const double eps = normal(rng, p.eps_mean, p.eps_sd);
  const double base = a.demographic == 0 ? p.base_young : (a.demographic == 1 ? p.base_adult : p.base_senior);
  const double activity = base * a.qos * std::exp(eps);
  a.events = poisson(rng, p.event_rate * activity * p.parse_quality);
  return a;
}

void emit_window(std::ostringstream& out, std::string_view label, const SimParams& p, const SimParams& ref_params,
                 std::size_t n, std::uint64_t seed) {
  static constexpr const char* kDemographic[] = {"young", "adult", "senior"};
  Rng rng(derive_seed(seed, std::string(label)));
  Rng stale(derive_seed(seed, "stale-" + std::string(label)));
  for (std::size_t i = 0; i < n; ++i) {
    const Activity a = draw_activity(rng, p);
    double x = std::log1p(static_cast<double>(a.events));
    if (!p.fresh) x = std::log1p(static_cast<double>(draw_activity(stale, ref_params).events));
    x += p.feature_bias;
    const bool senior = a.demographic == 2;
    const double c = p.model_v2 ? logistic(p.v2_a0 + p.v2_a1 * x + p.v2_a2 * senior)
                                : logistic(p.v1_a0 + p.v1_a1 * x + p.v1_a2 * senior);
    const int o = c >= p.outreach_threshold ? 1 : 0;
    const double r = logistic(p.r0 + p.r_score * c + p.r_feature * x);
    const int sent = o * (r >= p.offer_threshold ? 1 : 0);
    out << label << ',' << o << ',' << num(p.outreach_threshold) << ',' << num(p.offer_threshold) << ',' << sent
        << ',' << num(a.qos) << ',' << a.events << ',' << num(x) << ',' << a.events << ','
        << (p.fresh ? "fresh" : "stale") << ',' << num(p.parse_quality) << ',' << num(c) << ','
        << (p.model_v2 ? "v2" : "v1") << ',' << num(r) << ",v1," << kDemographic[a.demographic] << '\n';
  }
}

}  // namespace

Simulation generate(const ScenarioConfig& config) {
  if (config.n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  const SimParams cur = scenario_params(config.scenario, config.params);
  std::ostringstream out;
  out << "window,application.outreach,application.outreach_policy,application2.offer_threshold,"
         "application2.promotion_sent,env.quality_of_service,pipeline.activity_events,"
         "pipeline.activity_features,pipeline.daily_counts,pipeline.data_freshness,pipeline.parse_quality,"
         "serving.churn_score_out,serving.model_version,serving2.promo_ranking,serving2.ranker_version,"
         "system.demographic_features\n";
  emit_window(out, "ref", config.params, config.params, config.n, config.seed);
  emit_window(out, "cur", cur, config.params, config.n, config.seed);
  Simulation sim{churn_map(), out.str(), {}};
  std::istringstream in(sim.csv);
  sim.dataset = load_csv(sim.map, in);
  return sim;
}

std::vector<ExpectedStep> expected_patterns(std::string_view scenario) {
  if (scenario == "S0") return {};
  if (scenario == "S1") return {{Pattern::AP1_1, "application"}, {Pattern::AP2_1, "application.outreach_policy"}};
  if (scenario == "S2") return {{Pattern::AP1_2, "pipeline"}, {Pattern::AP2_1, "pipeline.parse_quality"}};
  if (scenario == "S3") return {{Pattern::AP1_2, "pipeline"}, {Pattern::AP2_2, "pipeline.activity_features"}};
  if (scenario == "S4") {
    return {{Pattern::AP1_2, "pipeline"},
            {Pattern::AP2_3, "pipeline.activity_events"},
            {Pattern::AP3_1, "env.quality_of_service"}};
  }
  if (scenario == "S5") {
    return {{Pattern::AP1_2, "pipeline"}, {Pattern::AP2_3, "pipeline.activity_events"}, {Pattern::AP3_2, "env.user_activity"}};
  }
  if (scenario == "S6") return {{Pattern::AP1_1, "serving"}, {Pattern::AP2_1, "serving.model_version"}};
  throw Error(ErrorCode::UnknownScenario, "unknown scenario '" + std::string(scenario) + "'");
}

std::string designated_alert(std::string_view scenario) {
  if (scenario == "S1") return "system.outreach_decision";
  (void)expected_patterns(scenario);  // validates the id
  return "system.promo_ranking";
}

std::vector<ExpectedStep> observed_patterns(const TraceReport& report) {
  std::vector<ExpectedStep> out;
  for (const auto& e : pattern_path(report)) {
    const bool routed = e.pattern == Pattern::AP1_1 || e.pattern == Pattern::AP1_2;
    out.push_back({e.pattern, routed ? e.route : e.node});
  }
  return out;
}

std::string format_path(const std::vector<ExpectedStep>& path) {
  std::string s = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += ", ";
    s += std::string(to_string(path[i].pattern));
    if (!path[i].key.empty()) s += " " + path[i].key;
  }
  return s + "]";
}

}  // namespace msm
