#include "msm/map.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

namespace msm {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Data: return "data";
    case NodeKind::Modulator: return "modulator";
    case NodeKind::Random: return "random";
  }
  return "?";
}

std::string_view to_string(RelationKind kind) {
  switch (kind) {
    case RelationKind::Causal: return "edge";
    case RelationKind::Mapping: return "equiv";
    case RelationKind::Measure: return "measure";
    case RelationKind::Actuate: return "actuate";
  }
  return "?";
}

ViewKind ViewKind::from_name(std::string_view name) {
  if (name == kSystemViewName) return ml_system();
  if (name == kEnvironmentViewName) return environment();
  return subsystem(std::string(name));
}

std::string ViewKind::label() const {
  switch (type_) {
    case Type::MLSystem: return "MLSystem";
    case Type::Environment: return "Environment";
    case Type::Subsystem: return "Subsystem(" + name_ + ")";
  }
  return name_;
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(), [&](char c) { return alpha(c) || digit(c); });
}

// ---------------------------------------------------------------------------
// ViewGraph

int ViewGraph::index_of(std::string_view name) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), name);
  if (it == nodes.end() || *it != name) return -1;
  return static_cast<int>(it - nodes.begin());
}

std::vector<std::vector<int>> ViewGraph::children() const {
  std::vector<std::vector<int>> out(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    for (int p : parents[v]) out[static_cast<std::size_t>(p)].push_back(static_cast<int>(v));
  }
  return out;
}

std::optional<std::vector<int>> ViewGraph::topological_order() const {
  const auto kids = children();
  std::vector<int> indegree(nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) indegree[v] = static_cast<int>(parents[v].size());
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (indegree[v] == 0) ready.push(static_cast<int>(v));
  }
  std::vector<int> order;
  order.reserve(nodes.size());
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : kids[static_cast<std::size_t>(v)]) {
      if (--indegree[static_cast<std::size_t>(c)] == 0) ready.push(c);
    }
  }
  if (order.size() != nodes.size()) return std::nullopt;
  return order;
}

std::vector<int> ViewGraph::ancestors(int node) const {
  std::vector<bool> seen(nodes.size(), false);
  std::vector<int> stack(parents[static_cast<std::size_t>(node)]);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (seen[static_cast<std::size_t>(v)]) continue;
    seen[static_cast<std::size_t>(v)] = true;
    for (int p : parents[static_cast<std::size_t>(v)]) stack.push_back(p);
  }
  std::vector<int> out;
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (seen[v]) out.push_back(static_cast<int>(v));
  }
  return out;
}

ViewGraph ViewGraph::restricted_to(const std::vector<std::string>& keep) const {
  std::set<std::string, std::less<>> wanted(keep.begin(), keep.end());
  ViewGraph out;
  out.view = view;
  std::vector<int> remap(nodes.size(), -1);
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (wanted.count(nodes[v])) {
      remap[v] = static_cast<int>(out.nodes.size());
      out.nodes.push_back(nodes[v]);
    }
  }
  out.parents.resize(out.nodes.size());
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (remap[v] < 0) continue;
    for (int p : parents[v]) {
      if (remap[static_cast<std::size_t>(p)] >= 0) {
        out.parents[static_cast<std::size_t>(remap[v])].push_back(remap[static_cast<std::size_t>(p)]);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SystemMap accessors

std::size_t SystemMap::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw Error(ErrorCode::UnknownNode, "unknown node '" + std::string(name) + "'");
  return it->second;
}

bool SystemMap::has_node(std::string_view name) const { return index_.find(name) != index_.end(); }

const Node& SystemMap::node(std::string_view name) const { return nodes_[index_of(name)]; }

bool SystemMap::has_view(const ViewKind& view) const {
  return std::find(views_.begin(), views_.end(), view) != views_.end();
}

bool SystemMap::has_environment() const { return has_view(ViewKind::environment()); }

ViewKind SystemMap::view_of(std::string_view name) const {
  return ViewKind::from_name(node(name).view_name);
}

std::vector<std::string> SystemMap::nodes_in(const ViewKind& view) const {
  std::vector<std::string> out;
  for (const auto& n : nodes_) {
    if (n.view_name == view.name()) out.push_back(n.name);
  }
  return out;
}

std::vector<std::string> SystemMap::parents(std::string_view name) const {
  index_of(name);
  std::vector<std::string> out;
  for (const auto& r : relations_) {
    if (r.kind == RelationKind::Causal && r.target == name) out.push_back(r.source);
  }
  return out;
}

std::vector<std::string> SystemMap::children(std::string_view name) const {
  index_of(name);
  std::vector<std::string> out;
  for (const auto& r : relations_) {
    if (r.kind == RelationKind::Causal && r.source == name) out.push_back(r.target);
  }
  return out;
}

std::vector<std::string> SystemMap::equivalence_class(std::string_view name) const {
  const std::size_t cls = class_id_[index_of(name)];
  std::vector<std::string> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (class_id_[i] == cls) out.push_back(nodes_[i].name);
  }
  return out;
}

std::string SystemMap::canonical(std::string_view name) const { return equivalence_class(name).front(); }

std::string SystemMap::terminal(const ViewKind& subsystem) const {
  auto it = terminals_.find(subsystem.name());
  if (!subsystem.is_subsystem() || it == terminals_.end()) {
    throw Error(ErrorCode::UnknownView, "no subsystem view '" + subsystem.name() + "'");
  }
  return it->second;
}

std::vector<std::string> SystemMap::measure_sources(std::string_view data_node) const {
  const auto cls = equivalence_class(data_node);
  std::set<std::string> out;
  for (const auto& r : relations_) {
    if (r.kind == RelationKind::Measure && std::binary_search(cls.begin(), cls.end(), r.target)) {
      out.insert(r.source);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> SystemMap::measure_proxies(std::string_view random_node) const {
  index_of(random_node);
  std::vector<std::string> out;
  for (const auto& r : relations_) {
    if (r.kind == RelationKind::Measure && r.source == random_node) out.push_back(r.target);
  }
  return out;
}

// ---------------------------------------------------------------------------
// build_map

namespace {

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

Error located(ErrorCode code, std::string message, const std::optional<SourcePos>& pos) {
  return Error(code, std::move(message), pos);
}

std::string edge_text(const RelationSpec& r) {
  if (r.kind == RelationKind::Mapping) return r.source + " = " + r.target;
  return r.source + " -> " + r.target;
}

// Finds one cycle in a view graph; returns names rotated so the smallest
// comes first.
std::vector<std::string> find_cycle(const ViewGraph& g) {
  const auto kids = g.children();
  std::vector<int> color(g.size(), 0);
  std::vector<int> stack;
  std::vector<std::string> cycle;

  auto dfs = [&](auto&& self, int v) -> bool {
    color[static_cast<std::size_t>(v)] = 1;
    stack.push_back(v);
    for (int c : kids[static_cast<std::size_t>(v)]) {
      if (color[static_cast<std::size_t>(c)] == 1) {
        auto it = std::find(stack.begin(), stack.end(), c);
        for (; it != stack.end(); ++it) cycle.push_back(g.nodes[static_cast<std::size_t>(*it)]);
        return true;
      }
      if (color[static_cast<std::size_t>(c)] == 0 && self(self, c)) return true;
    }
    stack.pop_back();
    color[static_cast<std::size_t>(v)] = 2;
    return false;
  };
  for (std::size_t v = 0; v < g.size() && cycle.empty(); ++v) {
    if (color[v] == 0) dfs(dfs, static_cast<int>(v));
  }
  if (!cycle.empty()) {
    auto smallest = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), smallest, cycle.end());
  }
  return cycle;
}

}  // namespace

SystemMap build_map(std::string name, std::vector<NodeSpec> node_specs,
                    std::vector<RelationSpec> relation_specs) {
  SystemMap map;
  map.name_ = std::move(name);

  // Nodes: names, duplicates, kinds per view.
  std::sort(node_specs.begin(), node_specs.end(),
            [](const NodeSpec& a, const NodeSpec& b) { return a.name < b.name; });
  std::map<std::string, std::optional<SourcePos>> node_pos;
  std::set<ViewKind> views;
  for (const auto& spec : node_specs) {
    const auto dot = spec.name.find('.');
    if (dot == std::string::npos || !is_identifier(std::string_view(spec.name).substr(0, dot)) ||
        !is_identifier(std::string_view(spec.name).substr(dot + 1))) {
      throw located(ErrorCode::InvalidName, "invalid qualified name '" + spec.name + "'", spec.pos);
    }
    if (map.index_.count(spec.name)) {
      throw located(ErrorCode::DuplicateNode, "duplicate node '" + spec.name + "'", spec.pos);
    }
    Node node{spec.name, spec.name.substr(0, dot), spec.name.substr(dot + 1), spec.kind, spec.boundary};
    const ViewKind view = ViewKind::from_name(node.view_name);
    if (node.kind == NodeKind::Random && !view.is_environment()) {
      throw located(ErrorCode::ViewViolation,
                    "random node '" + node.name + "' must be in the environment view", spec.pos);
    }
    if (node.kind != NodeKind::Random && view.is_environment()) {
      throw located(ErrorCode::ViewViolation,
                    "environment view admits only random nodes, got " + std::string(to_string(node.kind)) +
                        " '" + node.name + "'",
                    spec.pos);
    }
    if (node.kind == NodeKind::Modulator && view.is_system()) {
      throw located(ErrorCode::ViewViolation,
                    "modulator '" + node.name + "' not allowed in the ML system view", spec.pos);
    }
    if (node.boundary && !(view.is_subsystem() && node.kind == NodeKind::Data)) {
      throw located(ErrorCode::ViewViolation,
                    "boundary flag only applies to data nodes of subsystem views ('" + node.name + "')",
                    spec.pos);
    }
    map.index_.emplace(node.name, map.nodes_.size());
    node_pos[node.name] = spec.pos;
    map.nodes_.push_back(std::move(node));
    views.insert(view);
  }
  if (!map.nodes_.empty() && !views.count(ViewKind::ml_system())) {
    throw Error(ErrorCode::ViewViolation, "map has nodes but no ML system view");
  }
  map.views_.assign(views.begin(), views.end());

  // Relations: endpoints and kind rules.
  std::set<Relation> relations;
  std::map<Relation, std::optional<SourcePos>> relation_pos;
  for (auto& spec : relation_specs) {
    for (const auto* end : {&spec.source, &spec.target}) {
      if (!map.has_node(*end)) {
        throw located(ErrorCode::UnknownNode, "unknown node '" + *end + "' in '" + edge_text(spec) + "'",
                      spec.pos);
      }
    }
    const Node& src = map.node(spec.source);
    const Node& dst = map.node(spec.target);
    switch (spec.kind) {
      case RelationKind::Causal: {
        if (src.view_name != dst.view_name) {
          throw located(ErrorCode::ViewViolation,
                        "causal edge '" + edge_text(spec) + "' crosses views", spec.pos);
        }
        const bool ok = (src.kind == NodeKind::Data && dst.kind == NodeKind::Data) ||
                        (src.kind == NodeKind::Modulator && dst.kind == NodeKind::Data) ||
                        (src.kind == NodeKind::Random && dst.kind == NodeKind::Random);
        if (!ok) {
          throw located(ErrorCode::KindViolation,
                        "causal edge '" + edge_text(spec) + "' goes " + std::string(to_string(src.kind)) +
                            " -> " + std::string(to_string(dst.kind)),
                        spec.pos);
        }
        if (src.name == dst.name) {
          throw located(ErrorCode::CycleError, "cycle: [" + src.name + "]", spec.pos);
        }
        break;
      }
      case RelationKind::Mapping: {
        if (src.kind != NodeKind::Data || dst.kind != NodeKind::Data) {
          throw located(ErrorCode::MappingViolation,
                        "mapping '" + edge_text(spec) + "' must connect two data nodes", spec.pos);
        }
        if (src.view_name == dst.view_name) {
          throw located(ErrorCode::MappingViolation,
                        "mapping '" + edge_text(spec) + "' must connect different views", spec.pos);
        }
        if (spec.target < spec.source) std::swap(spec.source, spec.target);
        break;
      }
      case RelationKind::Measure:
        if (src.kind != NodeKind::Random || dst.kind != NodeKind::Data) {
          throw located(ErrorCode::KindViolation,
                        "measure '" + edge_text(spec) + "' must go random -> data", spec.pos);
        }
        break;
      case RelationKind::Actuate:
        if (src.kind != NodeKind::Data || dst.kind != NodeKind::Random) {
          throw located(ErrorCode::KindViolation,
                        "actuate '" + edge_text(spec) + "' must go data -> random", spec.pos);
        }
        break;
    }
    Relation rel{spec.source, spec.target, spec.kind};
    relation_pos.emplace(rel, spec.pos);
    relations.insert(std::move(rel));
  }
  map.relations_.assign(relations.begin(), relations.end());
  auto pos_of = [&](const Relation& r) { return relation_pos.at(r); };

  // Acyclicity per view.
  for (const auto& view : map.views_) {
    const ViewGraph g = view_graph(map, view);
    if (!g.is_acyclic()) {
      const auto cycle = find_cycle(g);
      std::string text;
      for (const auto& n : cycle) text += (text.empty() ? "" : ", ") + n;
      std::optional<SourcePos> pos;
      if (cycle.size() >= 2) {
        Relation closing{cycle.back(), cycle.front(), RelationKind::Causal};
        if (relation_pos.count(closing)) pos = pos_of(closing);
      }
      throw located(ErrorCode::CycleError, "cycle: [" + text + "]", pos);
    }
  }

  // Mapping equivalence classes.
  DisjointSet sets(map.nodes_.size());
  for (const auto& r : map.relations_) {
    if (r.kind == RelationKind::Mapping) sets.unite(map.index_of(r.source), map.index_of(r.target));
  }
  map.class_id_.resize(map.nodes_.size());
  for (std::size_t i = 0; i < map.nodes_.size(); ++i) map.class_id_[i] = sets.find(i);
  auto first_mapping_pos = [&](std::size_t cls) -> std::optional<SourcePos> {
    for (const auto& r : map.relations_) {
      if (r.kind == RelationKind::Mapping && map.class_id_[map.index_of(r.source)] == cls) return pos_of(r);
    }
    return std::nullopt;
  };
  {
    std::map<std::pair<std::size_t, std::string>, std::string> seen;
    for (std::size_t i = 0; i < map.nodes_.size(); ++i) {
      const auto key = std::make_pair(map.class_id_[i], map.nodes_[i].view_name);
      auto [it, inserted] = seen.emplace(key, map.nodes_[i].name);
      if (!inserted) {
        throw located(ErrorCode::MappingViolation,
                      "'" + it->second + "' and '" + map.nodes_[i].name +
                          "' are mapped to each other but share a view",
                      first_mapping_pos(map.class_id_[i]));
      }
    }
  }

  // Measure edges land on root data nodes.
  for (const auto& r : map.relations_) {
    if (r.kind == RelationKind::Measure && !map.parents(r.target).empty()) {
      throw located(ErrorCode::KindViolation,
                    "measure target '" + r.target + "' has in-view causal parents", pos_of(r));
    }
  }

  // One terminal per subsystem, mapped into the system view.
  for (const auto& view : map.views_) {
    if (!view.is_subsystem()) continue;
    std::vector<std::string> terminals;
    for (const auto& n : map.nodes_) {
      if (n.view_name == view.name() && n.kind == NodeKind::Data && map.children(n.name).empty()) {
        terminals.push_back(n.name);
      }
    }
    if (terminals.size() != 1) {
      std::string text;
      for (const auto& t : terminals) text += (text.empty() ? "" : ", ") + t;
      std::optional<SourcePos> pos;
      const auto members = map.nodes_in(view);
      if (!members.empty()) pos = node_pos[members.front()];
      throw located(ErrorCode::TerminalViolation,
                    "subsystem '" + view.name() + "' has " + std::to_string(terminals.size()) +
                        " terminal data nodes [" + text + "], expected exactly 1",
                    pos);
    }
    const auto cls = map.equivalence_class(terminals.front());
    const bool linked = std::any_of(cls.begin(), cls.end(), [&](const std::string& m) {
      return map.node(m).view_name == kSystemViewName;
    });
    if (!linked) {
      throw located(ErrorCode::TerminalViolation,
                    "terminal '" + terminals.front() + "' of subsystem '" + view.name() +
                        "' is not mapped to the ML system view",
                    node_pos[terminals.front()]);
    }
    map.terminals_.emplace(view.name(), terminals.front());
  }

  // Route uniqueness: a class touching subsystems holds exactly one terminal
  // whenever it also holds a system node.
  {
    std::map<std::size_t, std::vector<std::string>> class_terminals;
    for (const auto& [sub, term] : map.terminals_) class_terminals[map.class_id_[map.index_of(term)]].push_back(term);
    for (std::size_t i = 0; i < map.nodes_.size(); ++i) {
      const std::size_t cls = map.class_id_[i];
      const auto& terms = class_terminals[cls];
      if (terms.size() > 1) {
        throw located(ErrorCode::MappingViolation,
                      "terminals '" + terms[0] + "' and '" + terms[1] + "' are mapped to each other",
                      first_mapping_pos(cls));
      }
      if (map.nodes_[i].view_name != kSystemViewName || !terms.empty()) continue;
      const auto members = map.equivalence_class(map.nodes_[i].name);
      if (members.size() > 1) {
        throw located(ErrorCode::MappingViolation,
                      "system node '" + map.nodes_[i].name +
                          "' is mapped into subsystems but to no subsystem terminal",
                      first_mapping_pos(cls));
      }
    }
  }
  return map;
}

ViewGraph view_graph(const SystemMap& map, const ViewKind& view) {
  if (!map.has_view(view)) throw Error(ErrorCode::UnknownView, "map has no view " + view.label());
  ViewGraph g;
  g.view = view;
  g.nodes = map.nodes_in(view);
  g.parents.resize(g.nodes.size());
  for (const auto& r : map.relations()) {
    if (r.kind != RelationKind::Causal) continue;
    const int dst = g.index_of(r.target);
    if (dst < 0) continue;
    g.parents[static_cast<std::size_t>(dst)].push_back(g.index_of(r.source));
  }
  for (auto& ps : g.parents) std::sort(ps.begin(), ps.end());
  return g;
}

std::vector<std::string> equivalence_class(const SystemMap& map, std::string_view node) {
  return map.equivalence_class(node);
}

ViewKind route_subsystem(const SystemMap& map, std::string_view system_node) {
  const Node& n = map.node(system_node);
  if (n.view_name != kSystemViewName) {
    throw Error(ErrorCode::InvalidArgument, "'" + n.name + "' is not in the ML system view");
  }
  for (const auto& member : map.equivalence_class(system_node)) {
    const ViewKind view = map.view_of(member);
    if (view.is_subsystem() && map.terminal(view) == member) return view;
  }
  throw Error(ErrorCode::NoRoute, "'" + n.name + "' is not mapped to any subsystem terminal");
}

}  // namespace msm
