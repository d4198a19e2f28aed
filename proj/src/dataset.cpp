#include "msm/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>

namespace msm {

std::string_view to_string(Window window) { return window == Window::Ref ? "ref" : "cur"; }

bool Column::missing(std::size_t row) const {
  return type == ColumnType::Numeric ? std::isnan(numbers[row]) : tokens[row].empty();
}

Column Column::select(const std::vector<std::size_t>& rows) const {
  Column out{name, type, {}, {}};
  if (type == ColumnType::Numeric) {
    out.numbers.reserve(rows.size());
    for (auto r : rows) out.numbers.push_back(numbers[r]);
  } else {
    out.tokens.reserve(rows.size());
    for (auto r : rows) out.tokens.push_back(tokens[r]);
  }
  return out;
}

std::size_t WindowedDataset::rows_in(Window window) const {
  std::size_t n = 0;
  for (auto w : windows_) n += (w == window);
  return n;
}

const Column* WindowedDataset::column(std::string_view name) const {
  auto alias = alias_.find(name);
  if (alias == alias_.end()) return nullptr;
  auto it = columns_.find(alias->second);
  return it == columns_.end() ? nullptr : &it->second;
}

std::vector<std::string> WindowedDataset::column_names() const {
  std::vector<std::string> out;
  for (const auto& [name, col] : columns_) out.push_back(name);
  return out;
}

namespace {

bool parse_number(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(std::move(cell));
  return cells;
}

}  // namespace

WindowedDataset make_dataset(const SystemMap& map, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows) {
  WindowedDataset ds;
  std::size_t window_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "window") window_col = c;
  }
  if (window_col == header.size()) throw Error(ErrorCode::MissingWindowColumn, "no 'window' column in header");

  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw Error(ErrorCode::InvalidArgument, "row " + std::to_string(r + 2) + " has " +
                                                  std::to_string(rows[r].size()) + " cells, header has " +
                                                  std::to_string(header.size()));
    }
    const std::string& label = rows[r][window_col];
    if (label == "ref") ds.windows_.push_back(Window::Ref);
    else if (label == "cur") ds.windows_.push_back(Window::Cur);
    else throw Error(ErrorCode::BadWindowLabel, "row " + std::to_string(r + 2) + ": window label '" + label + "'");
  }
  for (Window w : {Window::Ref, Window::Cur}) {
    if (ds.rows_in(w) == 0) throw Error(ErrorCode::EmptyWindow, "window '" + std::string(to_string(w)) + "' has no rows");
  }

  std::map<std::string, std::string> claimed;  // canonical -> header name
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == window_col) continue;
    const std::string& name = header[c];
    if (!map.has_node(name)) {
      ds.warnings_.push_back("column '" + name + "' does not match any map node; ignored");
      continue;
    }
    const Node& node = map.node(name);
    const std::string canonical = map.canonical(name);
    if (auto [it, inserted] = claimed.emplace(canonical, name); !inserted) {
      throw Error(ErrorCode::DuplicateEquivalenceColumn,
                  "columns '" + it->second + "' and '" + name + "' belong to one equivalence class");
    }

    Column col;
    col.name = canonical;
    bool numeric = node.kind != NodeKind::Modulator;
    if (numeric) {
      double scratch = 0;
      for (const auto& row : rows) {
        if (!row[c].empty() && !parse_number(row[c], scratch)) {
          numeric = false;
          break;
        }
      }
    }
    if (numeric) {
      col.type = ColumnType::Numeric;
      col.numbers.reserve(rows.size());
      for (const auto& row : rows) {
        double v = std::numeric_limits<double>::quiet_NaN();
        if (!row[c].empty()) parse_number(row[c], v);
        col.numbers.push_back(v);
      }
    } else {
      col.type = ColumnType::Categorical;
      col.tokens.reserve(rows.size());
      for (const auto& row : rows) col.tokens.push_back(row[c]);
    }
    ds.columns_.emplace(canonical, std::move(col));
  }
  for (const auto& [canonical, header_name] : claimed) {
    for (const auto& member : map.equivalence_class(canonical)) ds.alias_.emplace(member, canonical);
  }
  return ds;
}

WindowedDataset load_csv(const SystemMap& map, std::istream& in) {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first) {
      if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      header = split_csv_line(line);
      first = false;
      continue;
    }
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (first) throw Error(ErrorCode::MissingWindowColumn, "empty CSV: no header row");
  return make_dataset(map, header, rows);
}

WindowedDataset load_csv_file(const SystemMap& map, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return load_csv(map, in);
}

const Column* backing_column(const WindowedDataset& ds, const SystemMap& map, std::string_view node) {
  if (const Column* col = ds.column(node)) return col;
  if (map.node(node).kind != NodeKind::Random) return nullptr;
  for (const auto& proxy : map.measure_proxies(node)) {
    if (const Column* col = ds.column(proxy)) return col;
  }
  return nullptr;
}

ViewTable view_matrix(const WindowedDataset& ds, const SystemMap& map, const ViewKind& view, Window window) {
  if (!map.has_view(view)) throw Error(ErrorCode::UnknownView, "map has no view " + view.label());
  ViewTable table;
  table.view = view;
  table.window = window;
  std::vector<const Column*> sources;
  for (const auto& name : map.nodes_in(view)) {
    if (const Column* col = backing_column(ds, map, name)) {
      table.nodes.push_back(name);
      sources.push_back(col);
    } else {
      table.excluded.push_back(name);
    }
  }
  std::vector<std::size_t> keep;
  const auto& windows = ds.windows();
  for (std::size_t r = 0; r < windows.size(); ++r) {
    if (windows[r] != window) continue;
    bool complete = true;
    for (const Column* col : sources) {
      if (col->missing(r)) {
        complete = false;
        break;
      }
    }
    if (complete) keep.push_back(r);
  }
  if (table.nodes.empty() || keep.empty()) {
    throw Error(ErrorCode::NoDataForView, view.label() + " has no complete rows in window '" +
                                              std::string(to_string(window)) + "'");
  }
  for (std::size_t i = 0; i < sources.size(); ++i) {
    Column col = sources[i]->select(keep);
    col.name = table.nodes[i];
    table.columns.push_back(std::move(col));
  }
  table.rows = keep.size();
  return table;
}

}  // namespace msm
