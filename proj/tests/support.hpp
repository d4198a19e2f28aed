// Generators and brute-force oracles shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "msm/dataset.hpp"
#include "msm/map.hpp"
#include "msm/mechanisms.hpp"
#include "msm/rng.hpp"

namespace msm::testing {

inline int rand_int(Rng& rng, int lo, int hi) {  // inclusive
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

inline bool coin(Rng& rng, double p) { return uniform01(rng) < p; }

inline std::vector<double> random_distribution(Rng& rng, int k, bool allow_zero = false) {
  std::vector<double> p(static_cast<std::size_t>(k));
  double total = 0;
  for (auto& x : p) {
    x = allow_zero && coin(rng, 0.2) ? 0.0 : 0.05 + uniform01(rng);
    total += x;
  }
  if (total == 0) {
    p[0] = 1;
    return p;
  }
  for (auto& x : p) x /= total;
  return p;
}

/// Random DAG over `n` nodes named v0..v{n-1}; edges only go from lower to
/// higher index, so the canonical order is also topological.
inline ViewGraph random_dag(Rng& rng, int n, double edge_p = 0.5) {
  ViewGraph g;
  for (int i = 0; i < n; ++i) g.nodes.push_back("system.v" + std::to_string(i));
  g.parents.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (coin(rng, edge_p)) g.parents[static_cast<std::size_t>(j)].push_back(i);
    }
  }
  return g;
}

inline Mechanism random_mechanism(Rng& rng, int states, const std::vector<int>& parent_states) {
  Mechanism m;
  m.states = states;
  m.parent_states = parent_states;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (double x : random_distribution(rng, states)) m.table.push_back(x);
  }
  return m;
}

/// Random two-window set; each node's cur table is redrawn with
/// probability `change_p`, else shared with ref.
inline MechanismSet random_set(Rng& rng, int n, int max_states, double change_p = 0.5) {
  ViewGraph g = random_dag(rng, n);
  std::vector<int> states;
  for (int i = 0; i < n; ++i) states.push_back(rand_int(rng, 2, max_states));
  std::vector<Mechanism> ref, cur;
  for (int j = 0; j < n; ++j) {
    std::vector<int> ps;
    for (int p : g.parents[static_cast<std::size_t>(j)]) ps.push_back(states[static_cast<std::size_t>(p)]);
    ref.push_back(random_mechanism(rng, states[static_cast<std::size_t>(j)], ps));
    cur.push_back(coin(rng, change_p) ? random_mechanism(rng, states[static_cast<std::size_t>(j)], ps) : ref.back());
  }
  return MechanismSet(std::move(g), std::move(ref), std::move(cur));
}

/// Marginal of `target` by summing the full joint over every state tuple.
inline std::vector<double> brute_force_marginal(const MechanismSet& mech, const Assignment& a, std::size_t target) {
  const std::size_t n = mech.size();
  std::vector<int> states(n);
  for (std::size_t i = 0; i < n; ++i) states[i] = mech.mechanism(i, Window::Ref).states;
  std::vector<double> out(static_cast<std::size_t>(states[target]), 0.0);
  std::vector<int> x(n, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Mechanism& m = mech.mechanism(i, a[i]);
      std::size_t config = 0;
      for (int par : mech.graph().parents[i]) {
        config = config * static_cast<std::size_t>(states[static_cast<std::size_t>(par)]) +
                 static_cast<std::size_t>(x[static_cast<std::size_t>(par)]);
      }
      p *= m.row(config)[static_cast<std::size_t>(x[i])];
    }
    out[static_cast<std::size_t>(x[target])] += p;
    std::size_t i = 0;
    while (i < n && ++x[i] == states[i]) x[i++] = 0;
    if (i == n) break;
  }
  return out;
}

/// Random valid map: a system view, up to two subsystems whose terminals map
/// to distinct system nodes, and optionally an environment with measure and
/// actuate links.
inline std::pair<std::vector<NodeSpec>, std::vector<RelationSpec>> random_map_specs(Rng& rng) {
  std::vector<NodeSpec> nodes;
  std::vector<RelationSpec> rels;
  const int ns = rand_int(rng, 1, 4);
  std::vector<std::string> sys;
  for (int i = 0; i < ns; ++i) {
    sys.push_back("system.s" + std::to_string(i));
    nodes.push_back({sys.back(), NodeKind::Data, false, {}});
  }
  std::vector<bool> has_parent(sys.size(), false);
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i < j; ++i) {
      if (coin(rng, 0.4)) {
        rels.push_back({sys[static_cast<std::size_t>(i)], sys[static_cast<std::size_t>(j)], RelationKind::Causal, {}});
        has_parent[static_cast<std::size_t>(j)] = true;
      }
    }
  }
  std::vector<int> free_sys;
  for (int i = 0; i < ns; ++i) free_sys.push_back(i);
  const int subs = rand_int(rng, 0, 2);
  for (int s = 0; s < subs && !free_sys.empty(); ++s) {
    const std::string view = "sub" + std::to_string(s);
    const int nd = rand_int(rng, 1, 3);
    std::vector<std::string> data;
    for (int i = 0; i < nd; ++i) {
      data.push_back(view + ".d" + std::to_string(i));
      nodes.push_back({data.back(), NodeKind::Data, i == 0 && nd > 1 && coin(rng, 0.5), {}});
    }
    // every other data node feeds the last one, so it is the only sink
    for (int i = 0; i + 1 < nd; ++i) {
      rels.push_back({data[static_cast<std::size_t>(i)], data.back(), RelationKind::Causal, {}});
      for (int j = i + 1; j + 1 < nd; ++j) {
        if (coin(rng, 0.3)) rels.push_back({data[static_cast<std::size_t>(i)], data[static_cast<std::size_t>(j)], RelationKind::Causal, {}});
      }
    }
    const int nm = rand_int(rng, 0, 2);
    for (int m = 0; m < nm; ++m) {
      const std::string mod = view + ".m" + std::to_string(m);
      nodes.push_back({mod, NodeKind::Modulator, false, {}});
      rels.push_back({mod, data[static_cast<std::size_t>(rand_int(rng, 0, nd - 1))], RelationKind::Causal, {}});
    }
    const auto pick = static_cast<std::size_t>(rand_int(rng, 0, static_cast<int>(free_sys.size()) - 1));
    const int target = free_sys[pick];
    free_sys.erase(free_sys.begin() + static_cast<std::ptrdiff_t>(pick));
    if (coin(rng, 0.5)) {
      rels.push_back({data.back(), sys[static_cast<std::size_t>(target)], RelationKind::Mapping, {}});
    } else {
      rels.push_back({sys[static_cast<std::size_t>(target)], data.back(), RelationKind::Mapping, {}});
    }
  }
  if (coin(rng, 0.6)) {
    const int ne = rand_int(rng, 1, 3);
    std::vector<std::string> env;
    for (int i = 0; i < ne; ++i) {
      env.push_back("env.r" + std::to_string(i));
      nodes.push_back({env.back(), NodeKind::Random, false, {}});
    }
    for (int j = 0; j < ne; ++j) {
      for (int i = 0; i < j; ++i) {
        if (coin(rng, 0.4)) rels.push_back({env[static_cast<std::size_t>(i)], env[static_cast<std::size_t>(j)], RelationKind::Causal, {}});
      }
    }
    for (int i = 0; i < ns; ++i) {
      if (!has_parent[static_cast<std::size_t>(i)] && coin(rng, 0.5)) {
        rels.push_back({env[static_cast<std::size_t>(rand_int(rng, 0, ne - 1))], sys[static_cast<std::size_t>(i)],
                        RelationKind::Measure, {}});
      }
    }
    if (coin(rng, 0.5)) {
      rels.push_back({sys[static_cast<std::size_t>(rand_int(rng, 0, ns - 1))], env[static_cast<std::size_t>(rand_int(rng, 0, ne - 1))],
                      RelationKind::Actuate, {}});
    }
  }
  // input order must not matter
  for (std::size_t i = nodes.size(); i > 1; --i) std::swap(nodes[i - 1], nodes[uniform_index(rng, i)]);
  for (std::size_t i = rels.size(); i > 1; --i) std::swap(rels[i - 1], rels[uniform_index(rng, i)]);
  return {nodes, rels};
}

inline SystemMap random_map(Rng& rng, const std::string& name = "m") {
  auto [nodes, rels] = random_map_specs(rng);
  return build_map(name, std::move(nodes), std::move(rels));
}

/// Map with a single system view over v0..v{n-1} in a random DAG, plus a
/// dataset with small integer codes whose conditional law differs between
/// windows. Goes through the CSV-shaped fit path.
struct FittedCase {
  SystemMap map;
  WindowedDataset ds;
  std::vector<std::string> nodes;
};

inline FittedCase random_fitted_case(Rng& rng, int n, int max_states, std::size_t rows) {
  const ViewGraph g = random_dag(rng, n, 0.4);
  std::vector<NodeSpec> specs;
  std::vector<RelationSpec> rels;
  for (const auto& name : g.nodes) specs.push_back({name, NodeKind::Data, false, {}});
  for (std::size_t j = 0; j < g.size(); ++j) {
    for (int p : g.parents[j]) rels.push_back({g.nodes[static_cast<std::size_t>(p)], g.nodes[j], RelationKind::Causal, {}});
  }
  FittedCase c{build_map("fit", specs, rels), {}, g.nodes};
  std::vector<int> states;
  for (int i = 0; i < n; ++i) states.push_back(rand_int(rng, 2, max_states));
  std::vector<std::string> header = {"window"};
  for (const auto& name : g.nodes) header.push_back(name);
  std::vector<std::vector<std::string>> cells;
  for (int w = 0; w < 2; ++w) {
    // per-window random offsets make the mechanisms differ
    std::vector<int> offset;
    for (int i = 0; i < n; ++i) offset.push_back(coin(rng, 0.5) ? rand_int(rng, 0, 2) : 0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<int> x(static_cast<std::size_t>(n));
      std::vector<std::string> row = {w == 0 ? "ref" : "cur"};
      for (std::size_t j = 0; j < g.size(); ++j) {
        int v = rand_int(rng, 0, states[j] - 1);
        if (coin(rng, 0.6)) {
          int s = offset[j];
          for (int p : g.parents[j]) s += x[static_cast<std::size_t>(p)];
          v = s % states[j];
        }
        x[j] = v;
        row.push_back(std::to_string(v));
      }
      cells.push_back(std::move(row));
    }
  }
  c.ds = make_dataset(c.map, header, cells);
  return c;
}

}  // namespace msm::testing
