#include "msm/traversal.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "msm/rng.hpp"

namespace msm {

std::string_view to_string(Pattern p) {
  switch (p) {
    case Pattern::AP1_1: return "AP1.1";
    case Pattern::AP1_2: return "AP1.2";
    case Pattern::AP2_1: return "AP2.1";
    case Pattern::AP2_2: return "AP2.2";
    case Pattern::AP2_3: return "AP2.3";
    case Pattern::AP3_1: return "AP3.1";
    case Pattern::AP3_2: return "AP3.2";
    case Pattern::DistributedBranch: return "Distributed";
    case Pattern::Negligible: return "Negligible";
  }
  return "?";
}

std::string_view describe(Pattern p) {
  switch (p) {
    case Pattern::AP1_1: return "SubsystemIsolated";
    case Pattern::AP1_2: return "IsolatedAtBoundary";
    case Pattern::AP2_1: return "RootCauseLocalized";
    case Pattern::AP2_2: return "ComponentLocalized";
    case Pattern::AP2_3: return "LocalizedAtBoundary";
    case Pattern::AP3_1: return "ExplainedExternally";
    case Pattern::AP3_2: return "CannotDetermine";
    case Pattern::DistributedBranch: return "DistributedBranch";
    case Pattern::Negligible: return "Negligible";
  }
  return "?";
}

std::string_view to_string(Verdict::Kind kind) {
  switch (kind) {
    case Verdict::Kind::RootCause: return "root-cause";
    case Verdict::Kind::Component: return "component";
    case Verdict::Kind::External: return "external";
    case Verdict::Kind::Undetermined: return "undetermined";
    case Verdict::Kind::Negligible: return "negligible";
  }
  return "?";
}

std::string_view to_string(ShapleyMode mode) {
  switch (mode) {
    case ShapleyMode::Auto: return "auto";
    case ShapleyMode::Exact: return "exact";
    case ShapleyMode::Sampled: return "sampled";
  }
  return "?";
}

ShapleyMode shapley_mode_from_string(std::string_view text) {
  if (text == "auto") return ShapleyMode::Auto;
  if (text == "exact") return ShapleyMode::Exact;
  if (text == "sampled") return ShapleyMode::Sampled;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + std::string(text) + "'");
}

PatternMatch pattern_for_node(const SystemMap& map, const ViewKind& view, std::string_view node,
                              std::string_view implicated) {
  const Node& n = map.node(node);
  if (ViewKind::from_name(n.view_name) != view) {
    throw Error(ErrorCode::ViewMismatch, "'" + n.name + "' is not in view " + view.label());
  }
  PatternMatch m;
  switch (view.type()) {
    case ViewKind::Type::MLSystem:
      m.pattern = map.parents(node).empty() ? Pattern::AP1_2 : Pattern::AP1_1;
      break;
    case ViewKind::Type::Subsystem:
      if (n.kind == NodeKind::Modulator) {
        m.pattern = Pattern::AP2_1;
      } else if (n.boundary) {
        m.pattern = Pattern::AP2_3;
      } else {
        m.pattern = Pattern::AP2_2;
      }
      break;
    case ViewKind::Type::Environment: {
      if (implicated.empty() || node == implicated) {
        m.pattern = Pattern::AP3_2;
        break;
      }
      const ViewGraph g = view_graph(map, view);
      const auto anc = g.ancestors(g.index_of(implicated));
      const int j = g.index_of(node);
      if (std::find(anc.begin(), anc.end(), j) != anc.end()) {
        m.pattern = Pattern::AP3_1;
      } else {
        m.pattern = Pattern::AP3_2;
        m.note = "non-ancestral mass on " + n.name;
      }
      break;
    }
  }
  return m;
}

PatternMatch match_pattern(const ViewKind& view, const SystemMap& map, const AttributionResult& result) {
  if (result.view != view) {
    throw Error(ErrorCode::ViewMismatch,
                "result computed on " + result.view.label() + ", expected " + view.label());
  }
  switch (result.classification.kind) {
    case Classification::Kind::Negligible: return {Pattern::Negligible, {}};
    case Classification::Kind::Distributed: return {Pattern::DistributedBranch, {}};
    case Classification::Kind::Concentrated: break;
  }
  return pattern_for_node(map, view, result.classification.nodes.front(),
                          view.is_environment() ? std::string_view(result.target) : std::string_view{});
}

namespace {

class Tracer {
 public:
  Tracer(const SystemMap& map, const WindowedDataset& ds, const TraceConfig& cfg)
      : map_(map), ds_(ds), cfg_(cfg) {}

  TraceStep aq1(const std::string& alert) { return step(1, ViewKind::ml_system(), alert); }

 private:
  const MechanismSet& mechanisms(const ViewKind& view) {
    auto it = fits_.find(view);
    if (it == fits_.end()) {
      FitOptions fo;
      fo.bins = cfg_.bins;
      fo.smoothing = cfg_.smoothing;
      it = fits_.emplace(view, fit_mechanisms(map_, ds_, view, fo)).first;
    }
    return it->second;
  }

  AttributionResult attribute(const MechanismSet& mech, const std::string& target) {
    AttributionOptions ao;
    ao.divergence = cfg_.divergence;
    ao.inference.state_limit = cfg_.state_limit;
    ao.exact_limit = cfg_.exact_limit;
    ao.tau = cfg_.tau;
    ao.epsilon = cfg_.epsilon;
    ao.branch_cutoff = cfg_.branch_cutoff;
    ao.fallback_samples = cfg_.fallback_samples;
    ao.seed = derive_seed(cfg_.seed, "marginal/" + target);
    bool exact = cfg_.mode == ShapleyMode::Exact ||
                 (cfg_.mode == ShapleyMode::Auto && static_cast<int>(mech.size()) <= cfg_.exact_limit);
    if (exact) return shapley_exact(mech, target, ao);
    return shapley_sampled(mech, target, cfg_.permutations, derive_seed(cfg_.seed, "shapley/" + target), ao);
  }

  static Verdict undetermined(std::string node, std::string note) {
    return {Verdict::Kind::Undetermined, std::move(node), std::move(note)};
  }

  TraceStep step(int level, const ViewKind& view, const std::string& target) {
    TraceStep s;
    s.level = level;
    s.view = view;
    s.target = target;
    const MechanismSet& mech = mechanisms(view);
    if (std::find(mech.nodes().begin(), mech.nodes().end(), target) == mech.nodes().end()) {
      s.result.view = view;
      s.result.target = target;
      s.pattern = view.is_environment() ? Pattern::AP3_2 : Pattern::Negligible;
      s.note = "no data for " + target;
      s.verdict = undetermined(target, "no data for " + target);
      return s;
    }
    s.result = attribute(mech, target);
    const PatternMatch m = match_pattern(view, map_, s.result);
    s.pattern = m.pattern;
    s.note = m.note;
    if (m.pattern == Pattern::Negligible) {
      s.verdict = Verdict{Verdict::Kind::Negligible, {}, "v(N) below epsilon"};
      return s;
    }

    const auto& nodes = s.result.classification.nodes;  // by descending share
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      Branch b;
      b.node = nodes[i];
      const auto player = static_cast<std::size_t>(mech.index_of(b.node));
      b.share = s.result.shares[player];
      if (m.pattern == Pattern::DistributedBranch) {
        const PatternMatch bm =
            pattern_for_node(map_, view, b.node, view.is_environment() ? std::string_view(target) : std::string_view{});
        b.pattern = bm.pattern;
        b.note = bm.note;
        if (static_cast<int>(i) >= cfg_.max_branches) {
          b.expanded = false;
          b.verdict = undetermined(b.node, "branch not expanded");
          s.branches.push_back(std::move(b));
          continue;
        }
      } else {
        b.pattern = m.pattern;
        b.note = m.note;
      }
      continue_branch(view, target, b);
      s.branches.push_back(std::move(b));
    }
    std::sort(s.branches.begin(), s.branches.end(),
              [](const Branch& a, const Branch& b) { return a.node < b.node; });
    return s;
  }

  void open_environment(const std::vector<std::string>& implicated, Branch& b) {
    if (!map_.has_environment()) {
      b.verdict = undetermined(b.node, "no environment view modeled");
      return;
    }
    if (implicated.empty()) {
      b.verdict = undetermined(b.node, "no measured environment variable");
      return;
    }
    for (const auto& r : implicated) b.next.push_back(step(3, ViewKind::environment(), r));
  }

  void continue_branch(const ViewKind& view, const std::string& target, Branch& b) {
    switch (b.pattern) {
      case Pattern::AP1_1:
      case Pattern::AP1_2: {
        std::optional<ViewKind> sub;
        try {
          sub = route_subsystem(map_, b.node);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoRoute) throw;
        }
        if (sub) b.next.push_back(step(2, *sub, map_.terminal(*sub)));
        if (b.pattern == Pattern::AP1_2) {
          const auto sources = map_.measure_sources(b.node);
          if (sub) b.note = "cause may also be environmental";
          if (cfg_.eager_environment || !sub) {
            if (!sources.empty() && map_.has_environment()) {
              for (const auto& r : sources) b.next.push_back(step(3, ViewKind::environment(), r));
            }
          }
        }
        if (b.next.empty()) b.verdict = undetermined(b.node, "no producing subsystem");
        break;
      }
      case Pattern::AP2_1: b.verdict = Verdict{Verdict::Kind::RootCause, b.node, {}}; break;
      case Pattern::AP2_2: b.verdict = Verdict{Verdict::Kind::Component, b.node, {}}; break;
      case Pattern::AP2_3: {
        auto implicated = map_.measure_sources(b.node);
        if (implicated.empty()) implicated = map_.measure_sources(target);
        open_environment(implicated, b);
        break;
      }
      case Pattern::AP3_1: b.verdict = Verdict{Verdict::Kind::External, b.node, {}}; break;
      case Pattern::AP3_2:
        b.verdict = undetermined(b.node, b.note.empty() ? "possible hidden confounder" : b.note);
        break;
      case Pattern::DistributedBranch:
      case Pattern::Negligible:
        b.verdict = undetermined(b.node, "unexpected pattern in " + view.label());
        break;
    }
  }

  const SystemMap& map_;
  const WindowedDataset& ds_;
  const TraceConfig& cfg_;
  std::map<ViewKind, MechanismSet> fits_;
};

void collect(const TraceStep& s, std::vector<Verdict>& out) {
  if (s.verdict) out.push_back(*s.verdict);
  for (const auto& b : s.branches) {
    if (b.verdict) out.push_back(*b.verdict);
    for (const auto& n : b.next) collect(n, out);
  }
}

void flatten(const TraceStep& s, std::vector<PathEntry>& out) {
  if (s.pattern == Pattern::Negligible || s.pattern == Pattern::DistributedBranch) {
    out.push_back({s.pattern, s.view.name(), {}, {}});
  }
  if (s.branches.empty() && s.pattern != Pattern::Negligible && s.pattern != Pattern::DistributedBranch) {
    out.push_back({s.pattern, s.view.name(), s.target, {}});
  }
  for (const auto& b : s.branches) {
    if (!b.expanded) continue;
    PathEntry e{b.pattern, s.view.name(), b.node, {}};
    if (b.pattern == Pattern::AP1_1 || b.pattern == Pattern::AP1_2) {
      for (const auto& n : b.next) {
        if (n.view.is_subsystem()) e.route = n.view.name();
      }
    }
    out.push_back(std::move(e));
    for (const auto& n : b.next) flatten(n, out);
  }
}

}  // namespace

TraceReport trace(const SystemMap& map, const WindowedDataset& ds, std::string_view alert, const TraceConfig& config) {
  if (!map.has_node(alert)) throw Error(ErrorCode::UnknownAlert, "unknown alert '" + std::string(alert) + "'");
  const Node& n = map.node(alert);
  if (!ViewKind::from_name(n.view_name).is_system() || n.kind != NodeKind::Data) {
    throw Error(ErrorCode::UnknownAlert, "'" + n.name + "' is not an ML system data variable");
  }
  if (backing_column(ds, map, alert) == nullptr) {
    throw Error(ErrorCode::InsufficientData, "no data for alert '" + n.name + "'");
  }
  TraceReport report;
  report.alert = n.name;
  if (map.has_environment()) {
    for (const auto& r : map.nodes_in(ViewKind::environment())) {
      if (backing_column(ds, map, r) == nullptr) report.excluded_environment.push_back(r);
    }
  }
  Tracer tracer(map, ds, config);
  report.root = tracer.aq1(n.name);
  collect(report.root, report.verdicts);
  auto note_sampling = [&](const TraceStep& s, auto&& self) -> void {
    if (s.result.sampled_marginals) {
      report.warnings.push_back(s.view.label() + ": some marginals estimated by ancestral sampling");
    }
    if (s.result.mode == AttributionMode::Sampled && !s.result.players.empty()) {
      report.warnings.push_back(s.view.label() + ": Shapley values estimated from " +
                                std::to_string(s.result.permutations) + " permutations");
    }
    for (const auto& b : s.branches) {
      for (const auto& next : b.next) self(next, self);
    }
  };
  note_sampling(report.root, note_sampling);
  return report;
}

DetectResult detect(const SystemMap& map, const WindowedDataset& ds, const DetectOptions& options) {
  DetectResult out;
  for (const auto& name : map.nodes_in(ViewKind::ml_system())) {
    ShiftTestOptions so;
    so.permutations = options.permutations;
    so.bins = options.bins;
    so.divergence = options.divergence;
    so.seed = derive_seed(options.seed, name);
    try {
      out.tests.push_back(shift_test(ds, map, name, so));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientData) throw;
      out.skipped.push_back(name);
      continue;
    }
    const auto& t = out.tests.back();
    if (t.p_value <= options.alpha) out.alerts.push_back({t.node, t.statistic, t.p_value});
  }
  std::sort(out.alerts.begin(), out.alerts.end(), [](const Alert& a, const Alert& b) {
    if (a.p_value != b.p_value) return a.p_value < b.p_value;
    return a.node < b.node;
  });
  return out;
}

std::vector<Alert> detect_alerts(const SystemMap& map, const WindowedDataset& ds, double alpha, int permutations,
                                 std::uint64_t seed) {
  DetectOptions o;
  o.alpha = alpha;
  o.permutations = permutations;
  o.seed = seed;
  return detect(map, ds, o).alerts;
}

std::vector<PathEntry> pattern_path(const TraceReport& report) {
  std::vector<PathEntry> out;
  flatten(report.root, out);
  return out;
}

}  // namespace msm
