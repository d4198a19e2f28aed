#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msm/errors.hpp"

namespace msm {

enum class NodeKind { Data, Modulator, Random };
enum class RelationKind { Causal, Mapping, Measure, Actuate };

std::string_view to_string(NodeKind kind);
std::string_view to_string(RelationKind kind);

// Reserved view names used as the prefix of qualified node names.
inline constexpr std::string_view kSystemViewName = "system";
inline constexpr std::string_view kEnvironmentViewName = "env";

/// One of the three view kinds. Subsystem views carry their name; the other
/// two use the reserved prefixes above. Ordering is the canonical view order:
/// system, subsystems by name, environment.
class ViewKind {
 public:
  enum class Type { MLSystem = 0, Subsystem = 1, Environment = 2 };

  static ViewKind ml_system() { return ViewKind(Type::MLSystem, std::string(kSystemViewName)); }
  static ViewKind environment() { return ViewKind(Type::Environment, std::string(kEnvironmentViewName)); }
  static ViewKind subsystem(std::string name) { return ViewKind(Type::Subsystem, std::move(name)); }
  /// Inverse of name(): "system", "env", or any other identifier.
  static ViewKind from_name(std::string_view name);

  Type type() const noexcept { return type_; }
  const std::string& name() const noexcept { return name_; }
  bool is_system() const noexcept { return type_ == Type::MLSystem; }
  bool is_subsystem() const noexcept { return type_ == Type::Subsystem; }
  bool is_environment() const noexcept { return type_ == Type::Environment; }

  /// "MLSystem", "Subsystem(pipeline)", "Environment".
  std::string label() const;

  friend bool operator==(const ViewKind&, const ViewKind&) = default;
  friend std::strong_ordering operator<=>(const ViewKind& a, const ViewKind& b) {
    if (auto c = static_cast<int>(a.type_) <=> static_cast<int>(b.type_); c != 0) return c;
    return a.name_.compare(b.name_) <=> 0;
  }

 private:
  ViewKind(Type type, std::string name) : type_(type), name_(std::move(name)) {}
  Type type_;
  std::string name_;
};

/// Input record for build_map. `name` is qualified ("view.local").
struct NodeSpec {
  std::string name;
  NodeKind kind = NodeKind::Data;
  bool boundary = false;
  std::optional<SourcePos> pos;
};

struct RelationSpec {
  std::string source;
  std::string target;
  RelationKind kind = RelationKind::Causal;
  std::optional<SourcePos> pos;
};

struct Node {
  std::string name;
  std::string view_name;
  std::string local;
  NodeKind kind = NodeKind::Data;
  bool boundary = false;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Relation {
  std::string source;
  std::string target;
  RelationKind kind = RelationKind::Causal;

  friend bool operator==(const Relation&, const Relation&) = default;
  friend auto operator<=>(const Relation&, const Relation&) = default;
};

/// Causal DAG of one view: node names in canonical order, parent lists by
/// index into `nodes`.
struct ViewGraph {
  ViewKind view = ViewKind::ml_system();
  std::vector<std::string> nodes;
  std::vector<std::vector<int>> parents;

  std::size_t size() const noexcept { return nodes.size(); }
  int index_of(std::string_view name) const;  // -1 when absent
  std::vector<std::vector<int>> children() const;
  /// Kahn's algorithm, smallest index first. Empty optional on a cycle.
  std::optional<std::vector<int>> topological_order() const;
  bool is_acyclic() const { return topological_order().has_value(); }
  /// Strict ancestors of `node`.
  std::vector<int> ancestors(int node) const;
  /// Subgraph induced by `keep` (names), preserving canonical order.
  ViewGraph restricted_to(const std::vector<std::string>& keep) const;
};

/// A validated ML System Map. Immutable after construction.
class SystemMap {
 public:
  SystemMap() = default;

  const std::string& name() const noexcept { return name_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Relation>& relations() const noexcept { return relations_; }
  const std::vector<ViewKind>& views() const noexcept { return views_; }

  bool has_node(std::string_view name) const;
  const Node& node(std::string_view name) const;  // throws UnknownNode
  bool has_view(const ViewKind& view) const;
  bool has_environment() const;
  ViewKind view_of(std::string_view node) const;
  std::vector<std::string> nodes_in(const ViewKind& view) const;

  /// In-view causal parents of a node, canonical order.
  std::vector<std::string> parents(std::string_view node) const;
  std::vector<std::string> children(std::string_view node) const;

  /// Mapping-equivalence class (sorted, always contains `node`).
  std::vector<std::string> equivalence_class(std::string_view node) const;
  /// Lexicographically smallest member of the node's class.
  std::string canonical(std::string_view node) const;

  /// The unique terminal Data node of a Subsystem view.
  std::string terminal(const ViewKind& subsystem) const;

  /// Random nodes with a Measure edge into any member of `data_node`'s class.
  std::vector<std::string> measure_sources(std::string_view data_node) const;
  /// Data nodes measuring `random_node` (Measure targets), sorted.
  std::vector<std::string> measure_proxies(std::string_view random_node) const;

  friend bool operator==(const SystemMap& a, const SystemMap& b) {
    return a.name_ == b.name_ && a.nodes_ == b.nodes_ && a.relations_ == b.relations_ &&
           a.views_ == b.views_;
  }

 private:
  friend SystemMap build_map(std::string name, std::vector<NodeSpec> nodes,
                             std::vector<RelationSpec> relations);

  std::size_t index_of(std::string_view name) const;

  std::string name_;
  std::vector<Node> nodes_;
  std::vector<Relation> relations_;
  std::vector<ViewKind> views_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::vector<std::size_t> class_id_;  // per node
  std::map<std::string, std::string> terminals_;  // subsystem name -> terminal
};

/// Validates and canonicalizes a map. Node and relation order in the result
/// is lexicographic regardless of input order; Mapping relations are stored
/// with source < target.
SystemMap build_map(std::string name, std::vector<NodeSpec> nodes,
                     std::vector<RelationSpec> relations);

ViewGraph view_graph(const SystemMap& map, const ViewKind& view);
std::vector<std::string> equivalence_class(const SystemMap& map, std::string_view node);
ViewKind route_subsystem(const SystemMap& map, std::string_view system_node);

bool is_identifier(std::string_view text);

}  // namespace msm
