#include "msm/mechanisms.hpp"

#include <cmath>
#include <numeric>

namespace msm {

std::size_t Mechanism::rows() const noexcept {
  std::size_t n = 1;
  for (int s : parent_states) n *= static_cast<std::size_t>(s);
  return n;
}

namespace {

void check_mechanism(const ViewGraph& g, std::size_t v, const Mechanism& m, const Mechanism& ref_form,
                     std::string_view label) {
  const std::string& name = g.nodes[v];
  if (m.states < 1) throw Error(ErrorCode::InvalidArgument, std::string(label) + " mechanism of '" + name + "' has no states");
  if (m.parent_states.size() != g.parents[v].size()) {
    throw Error(ErrorCode::InvalidArgument, std::string(label) + " mechanism of '" + name + "' has " +
                                                std::to_string(m.parent_states.size()) + " parents, graph has " +
                                                std::to_string(g.parents[v].size()));
  }
  if (m.states != ref_form.states || m.parent_states != ref_form.parent_states) {
    throw Error(ErrorCode::InvalidArgument, "reference and current mechanisms of '" + name + "' differ in shape");
  }
  if (m.table.size() != m.rows() * static_cast<std::size_t>(m.states)) {
    throw Error(ErrorCode::InvalidArgument, std::string(label) + " table of '" + name + "' has wrong size");
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sum = 0;
    for (double p : m.row(r)) {
      if (!(p >= 0.0)) throw Error(ErrorCode::NotNormalized, "negative probability in '" + name + "'");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::NotNormalized, std::string(label) + " row " + std::to_string(r) + " of '" + name +
                                                "' sums to " + std::to_string(sum));
    }
  }
}

}  // namespace

MechanismSet::MechanismSet(ViewGraph graph, std::vector<Mechanism> ref, std::vector<Mechanism> cur)
    : graph_(std::move(graph)), ref_(std::move(ref)), cur_(std::move(cur)) {
  if (ref_.size() != graph_.size() || cur_.size() != graph_.size()) {
    throw Error(ErrorCode::InvalidArgument, "mechanism count does not match the view graph");
  }
  if (!graph_.is_acyclic()) throw Error(ErrorCode::CycleError, "mechanism graph has a cycle");
  for (std::size_t v = 0; v < graph_.size(); ++v) {
    check_mechanism(graph_, v, ref_[v], ref_[v], "reference");
    check_mechanism(graph_, v, cur_[v], ref_[v], "current");
    for (std::size_t i = 0; i < graph_.parents[v].size(); ++i) {
      const auto p = static_cast<std::size_t>(graph_.parents[v][i]);
      if (ref_[v].parent_states[i] != ref_[p].states) {
        throw Error(ErrorCode::InvalidArgument, "parent state count mismatch on '" + graph_.nodes[v] + "'");
      }
    }
  }
}

int MechanismSet::index_of(std::string_view node) const {
  const int i = graph_.index_of(node);
  if (i < 0) throw Error(ErrorCode::UnknownNode, "'" + std::string(node) + "' is not in the mechanism set");
  return i;
}

MechanismSet fit_mechanisms(const SystemMap& map, const WindowedDataset& ds, const ViewKind& view,
                            const FitOptions& options) {
  if (options.smoothing < 0) throw Error(ErrorCode::InvalidArgument, "smoothing must be >= 0");
  const ViewTable ref = view_matrix(ds, map, view, Window::Ref);
  const ViewTable cur = view_matrix(ds, map, view, Window::Cur);
  const ViewGraph graph = view_graph(map, view).restricted_to(ref.nodes);
  Discretization bins = fit_discretization(ref, options.bins);

  const std::size_t n = graph.size();
  std::vector<std::vector<int>> ref_codes(n), cur_codes(n);
  std::vector<int> states(n);
  for (std::size_t v = 0; v < n; ++v) {
    ref_codes[v] = assign_bins(bins.variables[v], ref.columns[v]);
    cur_codes[v] = assign_bins(bins.variables[v], cur.columns[v]);
    states[v] = bins.variables[v].bins();
  }

  std::vector<Mechanism> ref_mech(n), cur_mech(n);
  for (std::size_t v = 0; v < n; ++v) {
    Mechanism shape;
    shape.states = states[v];
    for (int p : graph.parents[v]) shape.parent_states.push_back(states[static_cast<std::size_t>(p)]);
    const std::size_t rows = shape.rows();
    const auto k = static_cast<std::size_t>(shape.states);

    auto count = [&](const std::vector<std::vector<int>>& codes, std::size_t nrows) {
      std::vector<double> counts(rows * k, 0.0);
      for (std::size_t r = 0; r < nrows; ++r) {
        std::size_t config = 0;
        for (int p : graph.parents[v]) {
          config = config * static_cast<std::size_t>(states[static_cast<std::size_t>(p)]) +
                   static_cast<std::size_t>(codes[static_cast<std::size_t>(p)][r]);
        }
        counts[config * k + static_cast<std::size_t>(codes[v][r])] += 1.0;
      }
      return counts;
    };
    const auto ref_counts = count(ref_codes, ref.rows);
    const auto cur_counts = count(cur_codes, cur.rows);

    auto smoothed_row = [&](const std::vector<double>& counts, std::size_t config, std::vector<double>& out) {
      const double total = std::accumulate(counts.begin() + static_cast<std::ptrdiff_t>(config * k),
                                           counts.begin() + static_cast<std::ptrdiff_t>((config + 1) * k), 0.0);
      const double denom = total + options.smoothing * static_cast<double>(k);
      for (std::size_t s = 0; s < k; ++s) {
        out[config * k + s] = denom > 0 ? (counts[config * k + s] + options.smoothing) / denom
                                        : 1.0 / static_cast<double>(k);
      }
      return total;
    };

    ref_mech[v] = shape;
    cur_mech[v] = shape;
    ref_mech[v].table.assign(rows * k, 0.0);
    cur_mech[v].table.assign(rows * k, 0.0);
    for (std::size_t config = 0; config < rows; ++config) {
      const double ref_total = smoothed_row(ref_counts, config, ref_mech[v].table);
      const double cur_total = smoothed_row(cur_counts, config, cur_mech[v].table);
      auto row_of = [&](std::vector<double>& t) { return t.begin() + static_cast<std::ptrdiff_t>(config * k); };
      if (ref_total == 0 && cur_total > 0) {
        std::copy_n(row_of(cur_mech[v].table), k, row_of(ref_mech[v].table));
      } else if (cur_total == 0 && ref_total > 0) {
        std::copy_n(row_of(ref_mech[v].table), k, row_of(cur_mech[v].table));
      }
    }
  }

  MechanismSet out(graph, std::move(ref_mech), std::move(cur_mech));
  out.discretization = std::move(bins);
  out.excluded = ref.excluded;
  out.ref_rows = ref.rows;
  out.cur_rows = cur.rows;
  out.smoothing = options.smoothing;
  return out;
}

}  // namespace msm
