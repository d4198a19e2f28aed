#include "msm/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "msm/rng.hpp"

namespace msm {

std::string_view to_string(AttributionMode mode) { return mode == AttributionMode::Exact ? "exact" : "sampled"; }

std::string_view to_string(Classification::Kind kind) {
  switch (kind) {
    case Classification::Kind::Concentrated: return "concentrated";
    case Classification::Kind::Distributed: return "distributed";
    case Classification::Kind::Negligible: return "negligible";
  }
  return "?";
}

int AttributionResult::top() const {
  int best = -1;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    if (best < 0 || shares[i] > shares[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

std::vector<double> shares_of(const std::vector<double>& phi) {
  double total = 0;
  for (double x : phi) total += std::abs(x);
  std::vector<double> out(phi.size(), 0.0);
  if (total > 0) {
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = std::abs(phi[i]) / total;
  }
  return out;
}

std::vector<double> shapley_values_exact(int players, const Game& v) {
  if (players < 0 || players > 30) {
    throw Error(ErrorCode::TooManyPlayers, std::to_string(players) + " players is beyond exact enumeration");
  }
  const auto n = static_cast<std::size_t>(players);
  const std::uint64_t full = (std::uint64_t{1} << n);
  std::vector<double> value(full);
  for (std::uint64_t s = 0; s < full; ++s) value[s] = v(s);

  // |S|!(n-|S|-1)!/n! = 1 / (n * C(n-1, |S|))
  std::vector<double> weight(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double binom = 1;
    for (std::size_t i = 1; i <= s; ++i) binom = binom * static_cast<double>(n - 1 - s + i) / static_cast<double>(i);
    weight[s] = 1.0 / (static_cast<double>(n) * binom);
  }
  std::vector<double> phi(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t bit = std::uint64_t{1} << j;
    for (std::uint64_t s = 0; s < full; ++s) {
      if (s & bit) continue;
      const auto size = static_cast<std::size_t>(std::popcount(s));
      phi[j] += weight[size] * (value[s | bit] - value[s]);
    }
  }
  return phi;
}

std::vector<double> shapley_values_sampled(int players, const Game& v, int permutations, std::uint64_t seed) {
  if (permutations < 1) throw Error(ErrorCode::InvalidArgument, "permutations must be >= 1");
  if (players < 0 || players > 64) throw Error(ErrorCode::TooManyPlayers, std::to_string(players) + " players");
  const auto n = static_cast<std::size_t>(players);
  std::unordered_map<std::uint64_t, double> cache;
  auto value = [&](std::uint64_t s) {
    auto it = cache.find(s);
    if (it != cache.end()) return it->second;
    const double x = v(s);
    cache.emplace(s, x);
    return x;
  };
  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::vector<double> phi(n, 0.0);
  for (int p = 0; p < permutations; ++p) {
    std::iota(order.begin(), order.end(), 0);
    shuffle(order.begin(), order.end(), rng);
    std::uint64_t s = 0;
    double prev = value(0);
    for (std::size_t j : order) {
      s |= std::uint64_t{1} << j;
      const double next = value(s);
      phi[j] += next - prev;
      prev = next;
    }
  }
  for (double& x : phi) x /= permutations;
  return phi;
}

namespace {

Assignment assignment_for(std::size_t n, std::uint64_t subset) {
  Assignment a(n, Window::Ref);
  for (std::size_t j = 0; j < n; ++j) {
    if (subset & (std::uint64_t{1} << j)) a[j] = Window::Cur;
  }
  return a;
}

// Caches the all-reference marginal shared by every v(S).
class MechanismGame {
 public:
  MechanismGame(const MechanismSet& mech, std::size_t target, const AttributionOptions& options)
      : mech_(mech), target_(target), options_(options), baseline_(marginal(0)) {}

  double operator()(std::uint64_t subset) const {
    if (subset == 0) return 0.0;
    return divergence(options_.divergence, marginal(subset), baseline_);
  }

  bool sampled() const noexcept { return sampled_; }

 private:
  std::vector<double> marginal(std::uint64_t subset) const {
    const auto assignment = assignment_for(mech_.size(), subset);
    try {
      return target_marginal(mech_, assignment, target_, options_.inference);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StateSpaceTooLarge || options_.fallback_samples == 0) throw;
      sampled_ = true;
      return sample_marginal(mech_, assignment, target_, options_.fallback_samples,
                             derive_seed(options_.seed, std::to_string(subset)));
    }
  }

  const MechanismSet& mech_;
  std::size_t target_;
  const AttributionOptions& options_;
  mutable bool sampled_ = false;
  std::vector<double> baseline_;
};

AttributionResult finish(const MechanismSet& mech, std::string_view target, std::vector<double> phi, double total,
                         AttributionMode mode, int permutations, const AttributionOptions& options,
                         bool sampled_marginals) {
  AttributionResult r;
  r.sampled_marginals = sampled_marginals;
  r.view = mech.graph().view;
  r.target = std::string(target);
  r.players = mech.nodes();
  r.phi = std::move(phi);
  r.total = total;
  r.shares = shares_of(r.phi);
  r.mode = mode;
  r.permutations = permutations;
  r.classification = classify(r, options.tau, options.epsilon, options.branch_cutoff);
  return r;
}

}  // namespace

double set_function(const MechanismSet& mech, std::uint64_t subset, std::size_t target,
                    const AttributionOptions& options) {
  return MechanismGame(mech, target, options)(subset);
}

AttributionResult shapley_exact(const MechanismSet& mech, std::string_view target,
                                const AttributionOptions& options) {
  const auto t = static_cast<std::size_t>(mech.index_of(target));
  const int n = static_cast<int>(mech.size());
  if (n > options.exact_limit) {
    throw Error(ErrorCode::TooManyPlayers, std::to_string(n) + " players exceed the exact limit of " +
                                               std::to_string(options.exact_limit));
  }
  const MechanismGame game(mech, t, options);
  double total = 0;
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  auto phi = shapley_values_exact(n, [&](std::uint64_t s) {
    const double x = game(s);
    if (s == full) total = x;
    return x;
  });
  return finish(mech, target, std::move(phi), total, AttributionMode::Exact, 0, options, game.sampled());
}

AttributionResult shapley_sampled(const MechanismSet& mech, std::string_view target, int permutations,
                                  std::uint64_t seed, const AttributionOptions& options) {
  const auto t = static_cast<std::size_t>(mech.index_of(target));
  const int n = static_cast<int>(mech.size());
  const MechanismGame game(mech, t, options);
  auto phi = shapley_values_sampled(n, std::cref(game), permutations, seed);
  const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  const double total = game(full);
  return finish(mech, target, std::move(phi), total, AttributionMode::Sampled, permutations, options,
                game.sampled());
}

Classification classify(const AttributionResult& result, double tau, double epsilon, double cutoff) {
  Classification c;
  if (!(result.total >= epsilon)) {
    c.kind = Classification::Kind::Negligible;
    return c;
  }
  const auto shares = result.shares.empty() ? shares_of(result.phi) : result.shares;
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return shares[a] > shares[b]; });
  if (order.empty() || shares[order.front()] <= 0) {
    c.kind = Classification::Kind::Negligible;
    return c;
  }
  if (shares[order.front()] >= tau) {
    c.kind = Classification::Kind::Concentrated;
    c.nodes = {result.players[order.front()]};
    return c;
  }
  c.kind = Classification::Kind::Distributed;
  for (std::size_t i : order) {
    if (shares[i] >= cutoff) c.nodes.push_back(result.players[i]);
  }
  return c;
}

}  // namespace msm
