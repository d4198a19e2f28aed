#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msm/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = msm::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("msm_cli_test_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~Workdir() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }

  // simulate a scenario into data.csv / churn.msm
  void simulate(const std::string& scenario, const std::string& seed, const std::string& n = "5000") const {
    const Result r = run({"simulate", "--scenario", scenario, "--seed", seed, "--n", n, "--out-data",
                          path("data.csv"), "--out-map", path("churn.msm")});
    REQUIRE(r.code == 0);
  }
};

const std::string churn = std::string(MSM_SOURCE_DIR) + "/data/churn.msm";

}  // namespace

TEST_CASE("validate") {
  const Result ok = run({"validate", churn});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("ok: map churn", 0) == 0);

  Workdir w;
  std::ofstream(w.path("cycle.msm")) << "map c\nview system\n  data a\n  data b\n  edge a -> b\n  edge b -> a\n";
  const Result cyc = run({"validate", w.path("cycle.msm")});
  CHECK(cyc.code == 1);
  CHECK(cyc.err.find("cycle") != std::string::npos);

  CHECK(run({"validate", w.path("missing.msm")}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("detect lists alerts") {
  Workdir w;
  w.simulate("S1", "1");
  const Result all = run({"detect", w.path("churn.msm"), w.path("data.csv"), "--alpha", "1", "--format", "json",
                          "--permutations", "200"});
  REQUIRE(all.code == 0);
  const auto doc = nlohmann::json::parse(all.out);
  CHECK(doc["schema"] == "msm-report/1");
  CHECK(doc["alerts"].size() == 6);

  const Result s1 = run({"detect", w.path("churn.msm"), w.path("data.csv")});
  REQUIRE(s1.code == 0);
  CHECK(s1.out.find("system.outreach_decision") != std::string::npos);

  w.simulate("S0", "2");
  const Result s0 = run({"detect", w.path("churn.msm"), w.path("data.csv"), "--format", "json", "--seed", "2"});
  REQUIRE(s0.code == 0);
  CHECK(nlohmann::json::parse(s0.out)["alerts"].empty());
}

TEST_CASE("trace errors and text output") {
  Workdir w;
  w.simulate("S2", "1", "2000");
  const Result bad = run({"trace", w.path("churn.msm"), w.path("data.csv"), "--alert", "unknown_var"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("unknown_var") != std::string::npos);
  CHECK(run({"trace", w.path("churn.msm"), w.path("data.csv")}).code == 2);
  CHECK(run({"trace", w.path("churn.msm"), w.path("data.csv"), "--alert", "system.promo_ranking", "--mode", "fast"})
            .code == 2);

  const Result text = run({"trace", w.path("churn.msm"), w.path("data.csv"), "--alert", "system.promo_ranking"});
  REQUIRE(text.code == 0);
  CHECK(text.out.find("AQ1 [MLSystem] target=system.promo_ranking pattern=AP1.2") != std::string::npos);
  CHECK(text.out.find("=> root-cause pipeline.parse_quality") != std::string::npos);
}

TEST_CASE("simulate") {
  Workdir w;
  CHECK(run({"simulate", "--scenario", "S9"}).code == 1);
  const Result a = run({"simulate", "--scenario", "S3", "--seed", "5", "--n", "100"});
  const Result b = run({"simulate", "--scenario", "S3", "--seed", "5", "--n", "100"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  w.simulate("S0", "1", "10");
  CHECK(slurp(w.path("churn.msm")) == slurp(churn));
}

TEST_CASE("S4 json trace ends at quality of service") {
  Workdir w;
  w.simulate("S4", "3");
  const Result r = run({"trace", w.path("churn.msm"), w.path("data.csv"), "--alert", "system.promo_ranking",
                        "--format", "json", "--out", w.path("report.json")});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const auto doc = nlohmann::json::parse(slurp(w.path("report.json")));
  const auto& verdicts = doc["trace"]["verdicts"];
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0]["kind"] == "external");
  CHECK(verdicts[0]["node"] == "env.quality_of_service");
}
