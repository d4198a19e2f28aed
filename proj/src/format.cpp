#include "msm/format.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace msm {

namespace {

struct Token {
  std::string text;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '#') ++i;
    out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
  }
  return out;
}

[[noreturn]] void syntax_error(std::string message, int line, int column) {
  throw Error(ErrorCode::SyntaxError, std::move(message), SourcePos{line, column});
}

bool is_node_keyword(std::string_view word) {
  return word == "data" || word == "modulator" || word == "random";
}

NodeKind node_kind_of(std::string_view word) {
  if (word == "modulator") return NodeKind::Modulator;
  if (word == "random") return NodeKind::Random;
  return NodeKind::Data;
}

std::string view_name_of(const Declaration& view) {
  if (view.args[0] == "system") return std::string(kSystemViewName);
  if (view.args[0] == "environment") return std::string(kEnvironmentViewName);
  return view.args[1];
}

// Validates QNAME syntax and qualifies it against the current view.
std::string qualify(const Token& token, const std::string& view, int line) {
  const auto dot = token.text.find('.');
  if (dot == std::string::npos) {
    if (!is_identifier(token.text)) syntax_error("invalid name '" + token.text + "'", line, token.column);
    return view + "." + token.text;
  }
  const std::string_view text = token.text;
  if (!is_identifier(text.substr(0, dot)) || !is_identifier(text.substr(dot + 1))) {
    syntax_error("invalid qualified name '" + token.text + "'", line, token.column);
  }
  return token.text;
}

}  // namespace

MapDocument parse_document(std::string_view text) {
  MapDocument doc;
  doc.source = std::string(text);

  bool have_header = false;
  std::string current_view;
  std::set<std::string> seen_views;
  int line_no = 0;
  std::size_t cursor = 0;
  while (cursor <= text.size()) {
    auto end = text.find('\n', cursor);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(cursor, end - cursor);
    cursor = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto tokens = tokenize(line);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::string& keyword = tokens[0].text;

    if (!have_header) {
      if (keyword != "map") syntax_error("expected 'map NAME' header, got '" + keyword + "'", line_no, tokens[0].column);
      if (tokens.size() != 2) syntax_error("expected 'map NAME'", line_no, tokens[0].column);
      if (!is_identifier(tokens[1].text)) syntax_error("invalid map name '" + tokens[1].text + "'", line_no, tokens[1].column);
      doc.map_name = tokens[1].text;
      have_header = true;
      if (end == text.size()) break;
      continue;
    }

    Declaration decl;
    decl.pos = {line_no, tokens[0].column};

    if (keyword == "map") {
      syntax_error("duplicate 'map' header", line_no, tokens[0].column);
    } else if (keyword == "view") {
      decl.kind = Declaration::Kind::View;
      if (tokens.size() < 2) syntax_error("expected view kind after 'view'", line_no, tokens[0].column);
      const std::string& sort = tokens[1].text;
      if (sort == "system" || sort == "environment") {
        if (tokens.size() != 2) syntax_error("unexpected token '" + tokens[2].text + "'", line_no, tokens[2].column);
        decl.args = {sort};
        decl.arg_pos = {{line_no, tokens[1].column}};
      } else if (sort == "subsystem") {
        if (tokens.size() != 3) {
          if (tokens.size() < 3) syntax_error("expected subsystem name", line_no, tokens[1].column);
          syntax_error("unexpected token '" + tokens[3].text + "'", line_no, tokens[3].column);
        }
        const std::string& name = tokens[2].text;
        if (!is_identifier(name)) syntax_error("invalid subsystem name '" + name + "'", line_no, tokens[2].column);
        if (name == kSystemViewName || name == kEnvironmentViewName) {
          syntax_error("subsystem name '" + name + "' is reserved", line_no, tokens[2].column);
        }
        decl.args = {sort, name};
        decl.arg_pos = {{line_no, tokens[1].column}, {line_no, tokens[2].column}};
      } else {
        syntax_error("unknown view kind '" + sort + "'", line_no, tokens[1].column);
      }
      current_view = view_name_of(decl);
      if (!seen_views.insert(current_view).second) {
        syntax_error("duplicate view '" + current_view + "'", line_no, tokens[0].column);
      }
    } else if (is_node_keyword(keyword)) {
      decl.kind = Declaration::Kind::Node;
      if (current_view.empty()) syntax_error("node declaration before any view header", line_no, tokens[0].column);
      if (tokens.size() < 2) syntax_error("expected node name after '" + keyword + "'", line_no, tokens[0].column);
      if (!is_identifier(tokens[1].text)) syntax_error("invalid node name '" + tokens[1].text + "'", line_no, tokens[1].column);
      decl.args = {keyword, current_view + "." + tokens[1].text};
      decl.arg_pos = {{line_no, tokens[0].column}, {line_no, tokens[1].column}};
      if (tokens.size() >= 3) {
        if (tokens[2].text != "boundary") syntax_error("unexpected token '" + tokens[2].text + "'", line_no, tokens[2].column);
        if (tokens.size() > 3) syntax_error("unexpected token '" + tokens[3].text + "'", line_no, tokens[3].column);
        decl.args.push_back("boundary");
        decl.arg_pos.push_back({line_no, tokens[2].column});
      }
    } else if (keyword == "edge" || keyword == "equiv" || keyword == "measure" || keyword == "actuate") {
      if (keyword == "edge") decl.kind = Declaration::Kind::Edge;
      if (keyword == "equiv") decl.kind = Declaration::Kind::Equiv;
      if (keyword == "measure") decl.kind = Declaration::Kind::Measure;
      if (keyword == "actuate") decl.kind = Declaration::Kind::Actuate;
      if (current_view.empty()) syntax_error("'" + keyword + "' declaration before any view header", line_no, tokens[0].column);
      const std::string arrow = keyword == "equiv" ? "=" : "->";
      if (tokens.size() < 4) {
        const int col = tokens.back().column + static_cast<int>(tokens.back().text.size());
        syntax_error("expected '" + keyword + " A " + arrow + " B'", line_no, col);
      }
      if (tokens[2].text != arrow) syntax_error("expected '" + arrow + "', got '" + tokens[2].text + "'", line_no, tokens[2].column);
      if (tokens.size() > 4) syntax_error("unexpected token '" + tokens[4].text + "'", line_no, tokens[4].column);
      decl.args = {qualify(tokens[1], current_view, line_no), qualify(tokens[3], current_view, line_no)};
      decl.arg_pos = {{line_no, tokens[1].column}, {line_no, tokens[3].column}};
    } else {
      syntax_error("unknown keyword '" + keyword + "'", line_no, tokens[0].column);
    }
    doc.declarations.push_back(std::move(decl));
    if (end == text.size()) break;
  }
  if (!have_header) syntax_error("expected 'map NAME' header", std::max(line_no, 1), 1);

  // Resolve references against the full set of declared nodes.
  std::set<std::string> declared;
  for (const auto& d : doc.declarations) {
    if (d.kind == Declaration::Kind::Node) declared.insert(d.args[1]);
  }
  std::map<std::string, SourcePos> empty_views;
  std::string view;
  for (const auto& d : doc.declarations) {
    if (d.kind == Declaration::Kind::View) {
      view = view_name_of(d);
      empty_views.emplace(view, d.pos);
    } else if (d.kind == Declaration::Kind::Node) {
      empty_views.erase(view);
    } else {
      for (std::size_t i = 0; i < 2; ++i) {
        if (!declared.count(d.args[i])) {
          std::string shown = d.args[i];
          const auto dot = shown.find('.');
          if (shown.compare(0, dot, view) == 0) shown = shown.substr(dot + 1);
          syntax_error("unknown node '" + shown + "'", d.arg_pos[i].line, d.arg_pos[i].column);
        }
      }
    }
  }
  if (!empty_views.empty()) {
    const auto& [name, pos] = *std::min_element(
        empty_views.begin(), empty_views.end(),
        [](const auto& a, const auto& b) { return a.second.line < b.second.line; });
    syntax_error("view '" + name + "' declares no nodes", pos.line, pos.column);
  }
  return doc;
}

SystemMap parse_map(std::string_view text) {
  const MapDocument doc = parse_document(text);
  std::vector<NodeSpec> nodes;
  std::vector<RelationSpec> relations;
  for (const auto& d : doc.declarations) {
    switch (d.kind) {
      case Declaration::Kind::View:
        break;
      case Declaration::Kind::Node:
        nodes.push_back({d.args[1], node_kind_of(d.args[0]), d.args.size() == 3, d.arg_pos[1]});
        break;
      case Declaration::Kind::Edge:
        relations.push_back({d.args[0], d.args[1], RelationKind::Causal, d.pos});
        break;
      case Declaration::Kind::Equiv:
        relations.push_back({d.args[0], d.args[1], RelationKind::Mapping, d.pos});
        break;
      case Declaration::Kind::Measure:
        relations.push_back({d.args[0], d.args[1], RelationKind::Measure, d.pos});
        break;
      case Declaration::Kind::Actuate:
        relations.push_back({d.args[0], d.args[1], RelationKind::Actuate, d.pos});
        break;
    }
  }
  try {
    return build_map(doc.map_name, std::move(nodes), std::move(relations));
  } catch (const Error& e) {
    throw e.at(SourcePos{1, 1});
  }
}

std::string serialize_map(const SystemMap& map) {
  std::ostringstream out;
  out << "map " << map.name() << "\n";
  for (const auto& view : map.views()) {
    if (view.is_system()) out << "view system\n";
    else if (view.is_environment()) out << "view environment\n";
    else out << "view subsystem " << view.name() << "\n";

    for (const auto& n : map.nodes()) {
      if (n.view_name != view.name()) continue;
      out << "  " << to_string(n.kind) << " " << n.local << (n.boundary ? " boundary" : "") << "\n";
    }
    for (RelationKind kind : {RelationKind::Causal, RelationKind::Mapping, RelationKind::Measure,
                              RelationKind::Actuate}) {
      for (const auto& r : map.relations()) {
        if (r.kind != kind || map.node(r.source).view_name != view.name()) continue;
        if (kind == RelationKind::Causal) {
          out << "  edge " << map.node(r.source).local << " -> " << map.node(r.target).local << "\n";
        } else {
          out << "  " << to_string(kind) << " " << r.source << (kind == RelationKind::Mapping ? " = " : " -> ")
              << r.target << "\n";
        }
      }
    }
  }
  return out.str();
}

SystemMap load_map_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_map(buf.str());
}

}  // namespace msm
