#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "msm/divergence.hpp"
#include "msm/map.hpp"
#include "msm/mechanisms.hpp"

namespace msm {

enum class AttributionMode { Exact, Sampled };
std::string_view to_string(AttributionMode mode);

struct Classification {
  enum class Kind { Concentrated, Distributed, Negligible };
  Kind kind = Kind::Negligible;
  /// Concentrated: the single node. Distributed: nodes with share >= the
  /// branch cutoff, by descending share. Negligible: empty.
  std::vector<std::string> nodes;

  friend bool operator==(const Classification&, const Classification&) = default;
};
std::string_view to_string(Classification::Kind kind);

struct AttributionResult {
  ViewKind view = ViewKind::ml_system();
  std::string target;
  std::vector<std::string> players;
  std::vector<double> phi;
  double total = 0;  // v(N)
  std::vector<double> shares;
  AttributionMode mode = AttributionMode::Exact;
  int permutations = 0;
  Classification classification;
  bool sampled_marginals = false;  // some v(S) came from ancestral sampling

  /// Index of the largest share (ties broken by player order); -1 if none.
  int top() const;

  friend bool operator==(const AttributionResult&, const AttributionResult&) = default;
};

struct AttributionOptions {
  Divergence divergence = Divergence::JensenShannon;
  InferenceOptions inference;
  int exact_limit = 12;
  double tau = 0.5;            // concentration threshold on the top share
  double epsilon = 1e-3;       // v(N) below this is negligible
  double branch_cutoff = 0.2;  // share needed to join a distributed branch
  /// When exact elimination overflows the state limit, estimate marginals
  /// from this many ancestral samples instead (0 disables the fallback).
  std::size_t fallback_samples = 0;
  std::uint64_t seed = 0;
};

/// Characteristic function over player bitmasks (bit j = player j).
using Game = std::function<double(std::uint64_t)>;

std::vector<double> shapley_values_exact(int players, const Game& v);
std::vector<double> shapley_values_sampled(int players, const Game& v, int permutations, std::uint64_t seed);

/// v(S): divergence between the target marginal with S's mechanisms taken
/// from the current window (all others reference) and the all-reference
/// marginal.
double set_function(const MechanismSet& mech, std::uint64_t subset, std::size_t target,
                    const AttributionOptions& options = {});

AttributionResult shapley_exact(const MechanismSet& mech, std::string_view target,
                                const AttributionOptions& options = {});
AttributionResult shapley_sampled(const MechanismSet& mech, std::string_view target, int permutations,
                                  std::uint64_t seed, const AttributionOptions& options = {});

/// Negligible if v(N) < epsilon; Concentrated if the top share >= tau;
/// otherwise Distributed over shares >= cutoff. Depends only on shares and
/// v(N), so it is invariant to positive scaling of phi at fixed v(N).
Classification classify(const AttributionResult& result, double tau, double epsilon, double cutoff = 0.2);

/// Fills shares from phi (all zero when sum |phi| == 0).
std::vector<double> shares_of(const std::vector<double>& phi);

}  // namespace msm
