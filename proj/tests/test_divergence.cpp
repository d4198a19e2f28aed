#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "msm/divergence.hpp"
#include "msm/format.hpp"
#include "msm/shift_test.hpp"
#include "msm/simulator.hpp"
#include "support.hpp"

using namespace msm;
using namespace msm::testing;

namespace {

// Independent evaluation: 0.5 KL(p||m) + 0.5 KL(q||m) in long double.
double jsd_oracle(const std::vector<double>& p, const std::vector<double>& q) {
  long double out = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const long double m = 0.5L * (p[i] + q[i]);
    if (p[i] > 0) out += 0.5L * p[i] * std::log(p[i] / m);
    if (q[i] > 0) out += 0.5L * q[i] * std::log(q[i] / m);
  }
  return static_cast<double>(out);
}

}  // namespace

TEST_CASE("jsd reference values") {
  const std::vector<double> a{1, 0}, b{0, 1}, h{0.5, 0.5};
  CHECK(jsd(a, a) == 0.0);
  CHECK(jsd(a, b) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  CHECK(jsd(a, h) == doctest::Approx(jsd_oracle(a, h)).epsilon(1e-12));
  CHECK(jsd(a, h) == doctest::Approx(0.215761).epsilon(1e-6));
}

TEST_CASE("jsd input checks") {
  const std::vector<double> a{1, 0}, c{0.2, 0.3, 0.5}, bad{0.5, 0.6};
  CHECK_THROWS_AS(jsd(a, c), Error);
  try {
    jsd(a, bad);
    FAIL("expected NotNormalized");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotNormalized);
  }
  try {
    jsd(a, c);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("property: jsd matches the oracle, is symmetric and bounded") {
  Rng rng(31);
  for (int t = 0; t < 2000; ++t) {
    const int k = rand_int(rng, 1, 10);
    const auto p = random_distribution(rng, k, true), q = random_distribution(rng, k, true);
    const double d = jsd(p, q);
    CHECK(d == jsd(q, p));
    CHECK(d >= 0);
    CHECK(d <= std::numbers::ln2);
    CHECK(std::abs(d - jsd_oracle(p, q)) <= 1e-12);
    CHECK(jsd(p, p) == 0.0);
  }
}

TEST_CASE("total variation") {
  const std::vector<double> a{1, 0}, b{0, 1}, h{0.5, 0.5};
  CHECK(total_variation(a, b) == 1.0);
  CHECK(total_variation(a, h) == 0.5);
  CHECK(divergence(Divergence::TotalVariation, a, h) == 0.5);
  CHECK(divergence_from_string("jsd") == Divergence::JensenShannon);
  CHECK(divergence_from_string("tv") == Divergence::TotalVariation);
  CHECK_THROWS_AS(divergence_from_string("kl"), Error);
}

TEST_CASE("shift test null and insufficient data") {
  const SystemMap m = parse_map("map m\nview system\n  data x\n");
  auto dataset = [&](int per_window, bool same) {
    std::ostringstream csv;
    csv << "window,system.x\n";
    for (int i = 0; i < per_window; ++i) csv << "ref," << (i % 17) << '\n';
    for (int i = 0; i < per_window; ++i) csv << "cur," << (same ? i % 17 : i % 17 + 9) << '\n';
    std::istringstream in(csv.str());
    return load_csv(m, in);
  };
  ShiftTestOptions o;
  o.permutations = 500;
  const auto null = shift_test(dataset(200, true), m, "system.x", o);
  CHECK(null.statistic == 0.0);
  CHECK(null.p_value == 1.0);  // every permutation is at least as extreme as 0
  const auto shifted = shift_test(dataset(200, false), m, "system.x", o);
  CHECK(shifted.p_value == doctest::Approx(1.0 / 501));
  CHECK(shifted.ref_rows == 200);

  try {
    shift_test(dataset(10, true), m, "system.x", o);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
  o.permutations = 50;
  CHECK_THROWS_AS(shift_test(dataset(200, true), m, "system.x", o), Error);
}

TEST_CASE("shift test p-values are roughly uniform under the null") {
  Rng rng(17);
  double mean = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    std::vector<int> codes;
    std::vector<Window> windows;
    for (int i = 0; i < 120; ++i) {
      codes.push_back(static_cast<int>(uniform_index(rng, 4)));
      windows.push_back(i % 2 ? Window::Cur : Window::Ref);
    }
    ShiftTestOptions o;
    o.permutations = 200;
    o.seed = static_cast<std::uint64_t>(t);
    mean += shift_test_codes(codes, 4, windows, o).p_value;
  }
  mean /= trials;
  CHECK(mean > 0.4);
  CHECK(mean < 0.6);
}

TEST_CASE("S1 outreach decision shifts in at least 95% of seeds") {
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ScenarioConfig cfg;
    cfg.scenario = "S1";
    cfg.seed = seed;
    const Simulation sim = generate(cfg);
    ShiftTestOptions o;
    o.seed = seed;
    hits += shift_test(sim.dataset, sim.map, "system.outreach_decision", o).p_value <= 0.01;
  }
  CHECK(hits >= 19);
}
