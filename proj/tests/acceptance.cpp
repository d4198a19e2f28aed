// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "msm/attribution.hpp"
#include "msm/cli.hpp"
#include "msm/divergence.hpp"
#include "msm/format.hpp"
#include "msm/simulator.hpp"
#include "msm/traversal.hpp"
#include "support.hpp"

using namespace msm;
using namespace msm::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// 1. Shapley efficiency on fitted sets.
Outcome efficiency() {
  const auto t0 = Clock::now();
  Rng rng(derive_seed(1, "efficiency"));
  double worst = 0;
  for (int c = 0; c < 100; ++c) {
    const int n = rand_int(rng, 1, 8);
    const auto fc = random_fitted_case(rng, n, 4, 400);
    FitOptions fo;
    fo.bins = 4;
    const MechanismSet mech = fit_mechanisms(fc.map, fc.ds, ViewKind::ml_system(), fo);
    const std::string target = fc.nodes[static_cast<std::size_t>(rand_int(rng, 0, n - 1))];
    const auto r = shapley_exact(mech, target);
    double sum = 0;
    for (double x : r.phi) sum += x;
    const std::uint64_t full = (std::uint64_t{1} << mech.size()) - 1;
    const double vn = set_function(mech, full, static_cast<std::size_t>(mech.index_of(target)));
    worst = std::max({worst, std::abs(sum - vn), std::abs(sum - r.total)});
  }
  const double secs = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |sum phi - v(N)| = %.3g over 100 sets, %.2f s", worst, secs);
  return {worst <= 1e-9 && secs < 30, buf};
}

// 2. Only the changed node carries mass.
Outcome isolation() {
  Rng rng(derive_seed(2, "isolation"));
  double worst = 0;
  int cases = 0;
  for (int c = 0; c < 100; ++c) {
    const int n = rand_int(rng, 2, 7);
    MechanismSet base = random_set(rng, n, 3, 0.0);
    const auto changed = static_cast<std::size_t>(rand_int(rng, 0, n - 1));
    std::vector<Mechanism> ref, cur;
    for (std::size_t i = 0; i < base.size(); ++i) {
      ref.push_back(base.mechanism(i, Window::Ref));
      cur.push_back(ref.back());
    }
    cur[changed] = random_mechanism(rng, ref[changed].states, ref[changed].parent_states);
    const MechanismSet mech(base.graph(), ref, cur);
    // target: the changed node or one of its descendants
    std::size_t target = changed;
    for (std::size_t j = changed + 1; j < mech.size(); ++j) {
      const auto anc = mech.graph().ancestors(static_cast<int>(j));
      if (std::find(anc.begin(), anc.end(), static_cast<int>(changed)) != anc.end() && coin(rng, 0.5)) target = j;
    }
    const auto r = shapley_exact(mech, mech.nodes()[target]);
    for (std::size_t i = 0; i < r.phi.size(); ++i) {
      worst = std::max(worst, std::abs(r.phi[i] - (i == changed ? r.total : 0.0)));
    }
    ++cases;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max deviation %.3g over %d constructed sets", worst, cases);
  return {worst <= 1e-9, buf};
}

// 3. Variable elimination against joint enumeration.
Outcome inference_oracle() {
  Rng rng(derive_seed(3, "inference"));
  double worst = 0;
  for (int c = 0; c < 200; ++c) {
    const int n = rand_int(rng, 1, 5);
    const MechanismSet mech = random_set(rng, n, 3);
    Assignment a(mech.size());
    for (auto& w : a) w = coin(rng, 0.5) ? Window::Cur : Window::Ref;
    const auto target = static_cast<std::size_t>(rand_int(rng, 0, n - 1));
    const auto exact = target_marginal(mech, a, target);
    const auto brute = brute_force_marginal(mech, a, target);
    for (std::size_t s = 0; s < exact.size(); ++s) worst = std::max(worst, std::abs(exact[s] - brute[s]));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max abs gap %.3g over 200 random DAGs", worst);
  return {worst <= 1e-12, buf};
}

// 4. Sampled vs exact Shapley on the simulator's ML system view.
Outcome sampled_vs_exact() {
  int ok = 0;
  double worst_ratio = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ScenarioConfig cfg;
    cfg.scenario = "S2";
    cfg.seed = seed;
    const Simulation sim = generate(cfg);
    const MechanismSet mech = fit_mechanisms(sim.map, sim.dataset, ViewKind::ml_system());
    const auto exact = shapley_exact(mech, "system.promo_ranking");
    const auto sampled = shapley_sampled(mech, "system.promo_ranking", 500, derive_seed(seed, "perm"));
    double max_exact = 0, max_gap = 0;
    for (std::size_t j = 0; j < exact.phi.size(); ++j) {
      max_exact = std::max(max_exact, std::abs(exact.phi[j]));
      max_gap = std::max(max_gap, std::abs(exact.phi[j] - sampled.phi[j]));
    }
    const double bound = 0.05 * std::max(max_exact, 0.01);
    worst_ratio = std::max(worst_ratio, max_gap / bound);
    if (mech.size() == 6 && max_gap <= bound) ++ok;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d/20 seeds within bound (worst gap/bound %.3f)", ok, worst_ratio);
  return {ok >= 18, buf};
}

// 5. Scenario pattern reproduction.
Outcome scenarios() {
  bool pass = true;
  std::string detail;
  double slowest = 0;
  for (const auto& id : scenario_ids()) {
    int ok = 0;
    std::string first_miss;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto t0 = Clock::now();
      ScenarioConfig cfg;
      cfg.scenario = id;
      cfg.seed = seed;
      const Simulation sim = generate(cfg);
      const auto alerts = detect_alerts(sim.map, sim.dataset, 0.01, 1000, seed);
      bool hit = false;
      std::string got;
      if (id == "S0") {
        hit = alerts.empty();
        if (!hit) got = std::to_string(alerts.size()) + " alerts";
      } else {
        const std::string alert = designated_alert(id);
        const bool alerted = std::any_of(alerts.begin(), alerts.end(), [&](const Alert& a) { return a.node == alert; });
        TraceConfig tc;
        tc.seed = seed;
        const auto path = observed_patterns(trace(sim.map, sim.dataset, alert, tc));
        const auto want = expected_patterns(id);
        hit = alerted && path.size() == want.size() &&
              std::equal(path.begin(), path.end(), want.begin(), [](const ExpectedStep& a, const ExpectedStep& b) {
                return a.pattern == b.pattern && a.key == b.key;
              });
        got = (alerted ? "" : "no alert, ") + format_path(path);
      }
      slowest = std::max(slowest, seconds_since(t0));
      if (hit) {
        ++ok;
      } else if (first_miss.empty()) {
        first_miss = " (seed " + std::to_string(seed) + ": " + got + ")";
      }
    }
    const bool scenario_pass = ok >= 18;
    pass = pass && scenario_pass;
    detail += id + " " + std::to_string(ok) + "/20" + first_miss + "; ";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "slowest run %.2f s", slowest);
  detail += buf;
  return {pass && slowest < 60, detail};
}

// 6. Divergence properties.
Outcome divergence_properties() {
  Rng rng(derive_seed(6, "jsd"));
  int bad = 0;
  for (int c = 0; c < 1000; ++c) {
    const int k = rand_int(rng, 1, 12);
    const auto p = random_distribution(rng, k, true);
    const auto q = random_distribution(rng, k, true);
    const double pq = jsd(p, q), qp = jsd(q, p);
    if (pq != qp) ++bad;
    if (!(pq >= 0 && pq <= std::numbers::ln2)) ++bad;
    if (jsd(p, p) != 0.0 || jsd(q, q) != 0.0) ++bad;
  }
  return {bad == 0, std::to_string(bad) + " violations over 1000 pairs"};
}

// 7. Format round trip and positioned syntax errors.
Outcome round_trip() {
  int failures = 0;
  auto check = [&](const SystemMap& m) {
    const std::string s1 = serialize_map(m);
    const SystemMap back = parse_map(s1);
    if (!(back == m) || serialize_map(back) != s1) ++failures;
  };
  std::ifstream f(fs::path(MSM_SOURCE_DIR) / "data" / "churn.msm");
  std::stringstream text;
  text << f.rdbuf();
  const SystemMap churn = parse_map(text.str());
  check(churn);
  if (!(churn == churn_map())) ++failures;
  Rng rng(derive_seed(7, "maps"));
  for (int i = 0; i < 100; ++i) check(random_map(rng, "m" + std::to_string(i)));

  int files = 0, positioned = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(MSM_SOURCE_DIR) / "tests" / "corpus" / "invalid")) {
    if (entry.path().extension() != ".msm") continue;
    ++files;
    std::ifstream in(entry.path());
    std::stringstream bad;
    bad << in.rdbuf();
    try {
      parse_map(bad.str());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SyntaxError && e.pos() && e.pos()->line >= 1 && e.pos()->column >= 1) ++positioned;
    }
  }
  return {failures == 0 && files > 0 && positioned == files,
          std::to_string(101 - failures) + "/101 maps round-trip; " + std::to_string(positioned) + "/" +
              std::to_string(files) + " invalid files give a positioned SyntaxError"};
}

// 8. Byte-identical trace reports.
Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "msm_acceptance";
  fs::create_directories(dir);
  const std::string csv = (dir / "s4.csv").string(), map = (dir / "churn.msm").string();
  std::ostringstream sink, err;
  cli::run({"simulate", "--scenario", "S4", "--n", "5000", "--seed", "7", "--out-data", csv, "--out-map", map}, sink, err);
  std::vector<std::string> args = {"trace", map, csv, "--alert", "system.promo_ranking", "--seed", "7", "--format", "json"};
  std::ostringstream a, b;
  const int ca = cli::run(args, a, err);
  const int cb = cli::run(args, b, err);
  const bool same = ca == 0 && cb == 0 && !a.str().empty() && a.str() == b.str();
  return {same, std::to_string(a.str().size()) + " bytes, " + (same ? "identical" : "different or failed")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 shapley efficiency", efficiency},
      {"2 dummy/isolation", isolation},
      {"3 inference oracle", inference_oracle},
      {"4 sampled vs exact shapley", sampled_vs_exact},
      {"5 scenario pattern reproduction", scenarios},
      {"6 divergence properties", divergence_properties},
      {"7 format round-trip", round_trip},
      {"8 trace determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
