#include <algorithm>
#include <numeric>
#include <set>

#include "msm/mechanisms.hpp"
#include "msm/rng.hpp"

namespace msm {

namespace {

// Table over sorted variable ids; the last variable varies fastest.
struct Factor {
  std::vector<int> vars;
  std::vector<int> card;
  std::vector<double> values;
};

std::vector<std::size_t> strides_of(const std::vector<int>& card) {
  std::vector<std::size_t> s(card.size(), 1);
  for (std::size_t i = card.size(); i-- > 1;) s[i - 1] = s[i] * static_cast<std::size_t>(card[i]);
  return s;
}

double checked_size(const std::vector<int>& card, double limit) {
  double size = 1;
  for (int c : card) size *= c;
  if (size > limit) {
    throw Error(ErrorCode::StateSpaceTooLarge,
                "intermediate factor of " + std::to_string(static_cast<long long>(size)) +
                    " states exceeds the exact-inference limit; use sampled mode");
  }
  return size;
}

Factor multiply(const Factor& a, const Factor& b, double limit) {
  Factor out;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(out.vars));
  for (int v : out.vars) {
    auto ia = std::lower_bound(a.vars.begin(), a.vars.end(), v);
    out.card.push_back(ia != a.vars.end() && *ia == v ? a.card[static_cast<std::size_t>(ia - a.vars.begin())]
                                                      : b.card[static_cast<std::size_t>(
                                                            std::lower_bound(b.vars.begin(), b.vars.end(), v) -
                                                            b.vars.begin())]);
  }
  const auto size = static_cast<std::size_t>(checked_size(out.card, limit));
  // Stride of each output variable inside a and b (0 when absent).
  std::vector<std::size_t> sa(out.vars.size(), 0), sb(out.vars.size(), 0);
  const auto a_strides = strides_of(a.card);
  const auto b_strides = strides_of(b.card);
  for (std::size_t i = 0; i < out.vars.size(); ++i) {
    auto ia = std::lower_bound(a.vars.begin(), a.vars.end(), out.vars[i]);
    if (ia != a.vars.end() && *ia == out.vars[i]) sa[i] = a_strides[static_cast<std::size_t>(ia - a.vars.begin())];
    auto ib = std::lower_bound(b.vars.begin(), b.vars.end(), out.vars[i]);
    if (ib != b.vars.end() && *ib == out.vars[i]) sb[i] = b_strides[static_cast<std::size_t>(ib - b.vars.begin())];
  }
  out.values.resize(size);
  std::vector<int> digit(out.vars.size(), 0);
  std::size_t ia = 0, ib = 0;
  for (std::size_t idx = 0; idx < size; ++idx) {
    out.values[idx] = a.values[ia] * b.values[ib];
    for (std::size_t i = out.vars.size(); i-- > 0;) {
      if (++digit[i] < out.card[i]) {
        ia += sa[i];
        ib += sb[i];
        break;
      }
      ia -= sa[i] * static_cast<std::size_t>(out.card[i] - 1);
      ib -= sb[i] * static_cast<std::size_t>(out.card[i] - 1);
      digit[i] = 0;
    }
  }
  return out;
}

Factor sum_out(const Factor& f, int var) {
  const auto pos = static_cast<std::size_t>(std::lower_bound(f.vars.begin(), f.vars.end(), var) - f.vars.begin());
  Factor out;
  for (std::size_t i = 0; i < f.vars.size(); ++i) {
    if (i == pos) continue;
    out.vars.push_back(f.vars[i]);
    out.card.push_back(f.card[i]);
  }
  const auto strides = strides_of(f.card);
  const std::size_t inner = strides[pos];
  const auto k = static_cast<std::size_t>(f.card[pos]);
  const std::size_t outer = f.values.size() / (inner * k);
  out.values.assign(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < k; ++s) {
      const std::size_t base = (o * k + s) * inner;
      for (std::size_t i = 0; i < inner; ++i) out.values[o * inner + i] += f.values[base + i];
    }
  }
  return out;
}

Factor factor_of(const MechanismSet& mech, std::size_t node, Window window, double limit) {
  const ViewGraph& g = mech.graph();
  const Mechanism& m = mech.mechanism(node, window);
  const auto& parents = g.parents[node];
  Factor f;
  f.vars.assign(parents.begin(), parents.end());
  f.vars.push_back(static_cast<int>(node));
  std::sort(f.vars.begin(), f.vars.end());
  for (int v : f.vars) {
    f.card.push_back(v == static_cast<int>(node) ? m.states
                                                 : m.parent_states[static_cast<std::size_t>(
                                                       std::find(parents.begin(), parents.end(), v) - parents.begin())]);
  }
  const auto size = static_cast<std::size_t>(checked_size(f.card, limit));
  f.values.resize(size);
  // Position of each factor variable in the mechanism's (parents..., child) layout.
  std::vector<int> digit(f.vars.size(), 0);
  std::vector<std::size_t> parent_pos(f.vars.size(), 0);
  for (std::size_t i = 0; i < f.vars.size(); ++i) {
    if (f.vars[i] != static_cast<int>(node)) {
      parent_pos[i] = static_cast<std::size_t>(std::find(parents.begin(), parents.end(), f.vars[i]) - parents.begin());
    }
  }
  const auto child_pos = static_cast<std::size_t>(std::find(f.vars.begin(), f.vars.end(), static_cast<int>(node)) - f.vars.begin());
  std::vector<int> parent_value(parents.size(), 0);
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t config = 0;
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
      if (i != child_pos) parent_value[parent_pos[i]] = digit[i];
    }
    for (std::size_t p = 0; p < parents.size(); ++p) {
      config = config * static_cast<std::size_t>(m.parent_states[p]) + static_cast<std::size_t>(parent_value[p]);
    }
    f.values[idx] = m.row(config)[static_cast<std::size_t>(digit[child_pos])];
    for (std::size_t i = f.vars.size(); i-- > 0;) {
      if (++digit[i] < f.card[i]) break;
      digit[i] = 0;
    }
  }
  return f;
}

void check_assignment(const MechanismSet& mech, const Assignment& assignment, std::size_t target) {
  if (assignment.size() != mech.size()) {
    throw Error(ErrorCode::InvalidArgument, "assignment covers " + std::to_string(assignment.size()) +
                                                " nodes, mechanism set has " + std::to_string(mech.size()));
  }
  if (target >= mech.size()) throw Error(ErrorCode::UnknownNode, "target index out of range");
}

}  // namespace

std::vector<double> target_marginal(const MechanismSet& mech, const Assignment& assignment, std::size_t target,
                                    const InferenceOptions& options) {
  check_assignment(mech, assignment, target);
  const ViewGraph& g = mech.graph();
  const auto ancestors = g.ancestors(static_cast<int>(target));

  std::vector<Factor> factors;
  factors.push_back(factor_of(mech, target, assignment[target], options.state_limit));
  for (int a : ancestors) {
    factors.push_back(factor_of(mech, static_cast<std::size_t>(a), assignment[static_cast<std::size_t>(a)],
                                options.state_limit));
  }

  std::set<int> pending(ancestors.begin(), ancestors.end());
  while (!pending.empty()) {
    int best = -1;
    std::size_t best_degree = 0;
    for (int v : pending) {
      std::set<int> neighbours;
      for (const auto& f : factors) {
        if (std::binary_search(f.vars.begin(), f.vars.end(), v)) neighbours.insert(f.vars.begin(), f.vars.end());
      }
      const std::size_t degree = neighbours.empty() ? 0 : neighbours.size() - 1;
      if (best < 0 || degree < best_degree) {
        best = v;
        best_degree = degree;
      }
    }
    pending.erase(best);

    std::vector<Factor> rest;
    Factor joined{{}, {}, {1.0}};
    for (auto& f : factors) {
      if (std::binary_search(f.vars.begin(), f.vars.end(), best)) {
        joined = multiply(joined, f, options.state_limit);
      } else {
        rest.push_back(std::move(f));
      }
    }
    rest.push_back(sum_out(joined, best));
    factors = std::move(rest);
  }

  Factor result{{}, {}, {1.0}};
  for (const auto& f : factors) result = multiply(result, f, options.state_limit);
  std::vector<double> out(result.values.begin(), result.values.end());
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& p : out) p /= total;
  return out;
}

std::vector<double> target_marginal(const MechanismSet& mech, const Assignment& assignment,
                                    std::string_view target, const InferenceOptions& options) {
  return target_marginal(mech, assignment, static_cast<std::size_t>(mech.index_of(target)), options);
}

std::vector<double> sample_marginal(const MechanismSet& mech, const Assignment& assignment, std::size_t target,
                                    std::size_t samples, std::uint64_t seed) {
  check_assignment(mech, assignment, target);
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  const ViewGraph& g = mech.graph();
  auto needed = g.ancestors(static_cast<int>(target));
  needed.push_back(static_cast<int>(target));
  std::vector<bool> wanted(g.size(), false);
  for (int v : needed) wanted[static_cast<std::size_t>(v)] = true;
  const auto topo = g.topological_order();
  std::vector<int> order;
  for (int v : *topo) {
    if (wanted[static_cast<std::size_t>(v)]) order.push_back(v);
  }

  Rng rng(seed);
  std::vector<int> state(g.size(), 0);
  std::vector<double> hist(static_cast<std::size_t>(mech.mechanism(target, Window::Ref).states), 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int vi : order) {
      const auto v = static_cast<std::size_t>(vi);
      const Mechanism& m = mech.mechanism(v, assignment[v]);
      std::size_t config = 0;
      for (std::size_t p = 0; p < g.parents[v].size(); ++p) {
        config = config * static_cast<std::size_t>(m.parent_states[p]) +
                 static_cast<std::size_t>(state[static_cast<std::size_t>(g.parents[v][p])]);
      }
      const auto row = m.row(config);
      const double u = uniform01(rng);
      double acc = 0;
      int drawn = -1;
      for (std::size_t k = 0; k < row.size(); ++k) {
        acc += row[k];
        if (row[k] > 0) drawn = static_cast<int>(k);
        if (u < acc && row[k] > 0) break;
      }
      state[v] = drawn;
    }
    hist[static_cast<std::size_t>(state[target])] += 1.0;
  }
  for (double& h : hist) h /= static_cast<double>(samples);
  return hist;
}

}  // namespace msm
