#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "msm/map.hpp"

namespace msm {

enum class Window { Ref, Cur };

std::string_view to_string(Window window);

enum class ColumnType { Numeric, Categorical };

/// One variable's cells. Numeric columns use NaN for a missing cell,
/// categorical columns the empty token.
struct Column {
  std::string name;
  ColumnType type = ColumnType::Numeric;
  std::vector<double> numbers;
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return type == ColumnType::Numeric ? numbers.size() : tokens.size(); }
  bool missing(std::size_t row) const;
  /// Copy holding only the given rows, in that order.
  Column select(const std::vector<std::size_t>& rows) const;
};

/// Aligned observations for the reference and current windows. Columns are
/// stored under the canonical member of their mapping-equivalence class and
/// can be looked up by any member.
class WindowedDataset {
 public:
  std::size_t rows() const noexcept { return windows_.size(); }
  std::size_t rows_in(Window window) const;
  const std::vector<Window>& windows() const noexcept { return windows_; }

  /// nullptr when no column backs `name` (or its class).
  const Column* column(std::string_view name) const;
  std::vector<std::string> column_names() const;
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  friend WindowedDataset make_dataset(const SystemMap&, const std::vector<std::string>&,
                                      const std::vector<std::vector<std::string>>&);

  std::vector<Window> windows_;
  std::map<std::string, Column, std::less<>> columns_;   // canonical name -> column
  std::map<std::string, std::string, std::less<>> alias_;  // any class member -> canonical
  std::vector<std::string> warnings_;
};

/// Builds a dataset from a header and string cells (the CSV loader's core).
WindowedDataset make_dataset(const SystemMap& map, const std::vector<std::string>& header,
                             const std::vector<std::vector<std::string>>& rows);

WindowedDataset load_csv(const SystemMap& map, std::istream& in);
WindowedDataset load_csv_file(const SystemMap& map, const std::string& path);

/// Complete-case observations over one view for one window.
struct ViewTable {
  ViewKind view = ViewKind::ml_system();
  Window window = Window::Ref;
  std::vector<std::string> nodes;     // included nodes, canonical order
  std::vector<Column> columns;        // parallel to nodes, row-aligned
  std::vector<std::string> excluded;  // view nodes without any data
  std::size_t rows = 0;
};

ViewTable view_matrix(const WindowedDataset& ds, const SystemMap& map, const ViewKind& view,
                      Window window);

/// Column serving a node: its own (or class) column, or for a random node
/// without one, the column of its first measured proxy. nullptr if none.
const Column* backing_column(const WindowedDataset& ds, const SystemMap& map, std::string_view node);

}  // namespace msm
