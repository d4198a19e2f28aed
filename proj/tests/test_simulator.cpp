#include <doctest.h>

#include <fstream>
#include <sstream>

#include "msm/format.hpp"
#include "msm/simulator.hpp"

using namespace msm;

namespace {

std::string ref_part(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("ref,", 0) == 0) out += line + "\n";
  }
  return out;
}

}  // namespace

TEST_CASE("generation is deterministic") {
  ScenarioConfig c;
  c.scenario = "S3";
  c.n = 300;
  c.seed = 11;
  const Simulation a = generate(c), b = generate(c);
  CHECK(a.csv == b.csv);
  c.seed = 12;
  CHECK(generate(c).csv != a.csv);
}

TEST_CASE("reference window does not depend on the scenario") {
  ScenarioConfig c;
  c.n = 200;
  c.seed = 4;
  const std::string base = ref_part(generate(c).csv);
  for (const auto& id : scenario_ids()) {
    c.scenario = id;
    CHECK(ref_part(generate(c).csv) == base);
  }
}

TEST_CASE("row counts and header") {
  ScenarioConfig c;
  c.n = 123;
  const Simulation s = generate(c);
  std::istringstream in(s.csv);
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("window,", 0) == 0);
  int ref = 0, cur = 0;
  while (std::getline(in, line)) {
    ref += line.rfind("ref,", 0) == 0;
    cur += line.rfind("cur,", 0) == 0;
  }
  CHECK(ref == 123);
  CHECK(cur == 123);
}

TEST_CASE("unknown scenario") {
  ScenarioConfig c;
  c.scenario = "S9";
  try {
    generate(c);
    FAIL("expected UnknownScenario");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownScenario);
  }
}

TEST_CASE("bundled map file matches the embedded text") {
  std::ifstream f(std::string(MSM_SOURCE_DIR) + "/data/churn.msm", std::ios::binary);
  REQUIRE(f);
  std::ostringstream text;
  text << f.rdbuf();
  CHECK(text.str() == churn_map_text());
}

TEST_CASE("expected path table") {
  CHECK(expected_patterns("S0").empty());
  CHECK(format_path(expected_patterns("S4")) ==
        format_path({{Pattern::AP1_2, "pipeline"},
                     {Pattern::AP2_3, "pipeline.activity_events"},
                     {Pattern::AP3_1, "env.quality_of_service"}}));
  CHECK(designated_alert("S1") == "system.outreach_decision");
  CHECK(designated_alert("S6") == "system.promo_ranking");
  for (const auto& id : scenario_ids()) {
    CHECK(churn_map().has_node(designated_alert(id)));
  }
}
