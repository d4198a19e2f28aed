#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "msm/map.hpp"

namespace msm {

// Line-oriented map definition format (`.msm`):
//
//   map churn
//   view system
//     data churn_score
//   view subsystem serving
//     modulator model_version
//     data churn_score_out
//     edge model_version -> churn_score_out
//     equiv serving.churn_score_out = system.churn_score
//
// '#' starts a comment, indentation is insignificant, unqualified names
// resolve in the enclosing view.

struct Declaration {
  enum class Kind { View, Node, Edge, Equiv, Measure, Actuate };

  Kind kind = Kind::Node;
  /// View: {"system"} / {"subsystem", name} / {"environment"}.
  /// Node: {kind keyword, qualified name} plus "boundary" when flagged.
  /// Relations: {qualified source, qualified target}.
  std::vector<std::string> args;
  SourcePos pos;
  std::vector<SourcePos> arg_pos;
};

struct MapDocument {
  std::string source;
  std::string map_name;
  std::vector<Declaration> declarations;
};

/// Tokenizes and resolves names; does not run map validation.
MapDocument parse_document(std::string_view text);

/// Parses and validates. Every error carries a 1-based line and column.
SystemMap parse_map(std::string_view text);

/// Canonical text: views in order system, subsystems, environment; within a
/// view node declarations, then edges, equiv, measure and actuate lines, each
/// sorted. Cross-view relations are written in their source node's view.
std::string serialize_map(const SystemMap& map);

SystemMap load_map_file(const std::string& path);

}  // namespace msm
