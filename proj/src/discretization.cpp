#include "msm/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace msm {

int VariableBins::bin_of(double value) const {
  return static_cast<int>(std::upper_bound(edges.begin(), edges.end(), value) - edges.begin());
}

int VariableBins::bin_of(std::string_view token) const {
  auto it = std::lower_bound(levels.begin(), levels.end(), token);
  if (it == levels.end() || *it != token) return unseen_bin();
  return static_cast<int>(it - levels.begin());
}

const VariableBins& Discretization::at(std::string_view name) const {
  for (const auto& v : variables) {
    if (v.name == name) return v;
  }
  throw Error(ErrorCode::UnknownNode, "no bins for '" + std::string(name) + "'");
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

VariableBins fit_bins(const Column& column, int k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "bin count must be >= 2, got " + std::to_string(k));
  VariableBins out;
  out.name = column.name;
  out.type = column.type;
  if (column.type == ColumnType::Categorical) {
    std::set<std::string> levels;
    for (const auto& t : column.tokens) {
      if (!t.empty()) levels.insert(t);
    }
    if (levels.empty()) throw Error(ErrorCode::EmptyTable, "no observations for '" + column.name + "'");
    out.levels.assign(levels.begin(), levels.end());
    return out;
  }

  std::vector<double> values;
  values.reserve(column.numbers.size());
  for (double v : column.numbers) {
    if (!std::isnan(v)) values.push_back(v);
  }
  if (values.empty()) throw Error(ErrorCode::EmptyTable, "no observations for '" + column.name + "'");
  std::sort(values.begin(), values.end());

  std::vector<double> distinct;
  std::unique_copy(values.begin(), values.end(), std::back_inserter(distinct));
  if (static_cast<int>(distinct.size()) <= k) {
    for (std::size_t i = 1; i < distinct.size(); ++i) {
      out.edges.push_back(distinct[i - 1] + 0.5 * (distinct[i] - distinct[i - 1]));
    }
    return out;
  }
  // Edges at or below the minimum would open an empty leading bin.
  for (int j = 1; j < k; ++j) {
    const double edge = quantile_sorted(values, static_cast<double>(j) / k);
    if (edge <= values.front()) continue;
    if (!out.edges.empty() && edge <= out.edges.back()) continue;
    out.edges.push_back(edge);
  }
  return out;
}

Discretization fit_discretization(const ViewTable& table, int k) {
  if (table.rows == 0 || table.columns.empty()) {
    throw Error(ErrorCode::EmptyTable, "cannot discretize an empty " + table.view.label() + " table");
  }
  Discretization out;
  for (const auto& col : table.columns) out.variables.push_back(fit_bins(col, k));
  return out;
}

std::vector<int> assign_bins(const VariableBins& bins, const Column& column) {
  std::vector<int> out(column.size());
  for (std::size_t r = 0; r < column.size(); ++r) {
    if (bins.type == ColumnType::Numeric) {
      out[r] = column.type == ColumnType::Numeric ? bins.bin_of(column.numbers[r]) : 0;
    } else {
      out[r] = column.type == ColumnType::Categorical ? bins.bin_of(column.tokens[r]) : bins.unseen_bin();
    }
  }
  return out;
}

}  // namespace msm
