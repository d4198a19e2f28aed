#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "msm/dataset.hpp"

namespace msm {

/// Bins for one variable. Numeric: bin i holds [edges[i-1], edges[i]) with
/// open outer ends. Categorical: one bin per level plus a trailing "unseen"
/// bucket for tokens not observed at fit time.
struct VariableBins {
  std::string name;
  ColumnType type = ColumnType::Numeric;
  std::vector<double> edges;
  std::vector<std::string> levels;

  int bins() const noexcept {
    return type == ColumnType::Numeric ? static_cast<int>(edges.size()) + 1
                                       : static_cast<int>(levels.size()) + 1;
  }
  int bin_of(double value) const;
  int bin_of(std::string_view token) const;
  int unseen_bin() const noexcept { return static_cast<int>(levels.size()); }

  friend bool operator==(const VariableBins&, const VariableBins&) = default;
};

struct Discretization {
  std::vector<VariableBins> variables;  // canonical node order

  const VariableBins& at(std::string_view name) const;
  friend bool operator==(const Discretization&, const Discretization&) = default;
};

/// Quantile bins for numeric data (at most k bins; columns with at most k
/// distinct values get one bin per value), sorted levels for categoricals.
VariableBins fit_bins(const Column& column, int k);

/// Linear-interpolation sample quantile of sorted data, q in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double q);

/// Fits every column of a (reference-window) view table.
Discretization fit_discretization(const ViewTable& table, int k);

/// Bin index per row; missing cells are not expected here.
std::vector<int> assign_bins(const VariableBins& bins, const Column& column);

}  // namespace msm
