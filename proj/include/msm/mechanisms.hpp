#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msm/dataset.hpp"
#include "msm/discretization.hpp"
#include "msm/map.hpp"

namespace msm {

/// Probability table of one node over its discretized states. A marginal has
/// a single row; a conditional has one row per parent configuration, with the
/// first parent as the most significant digit of the row index.
struct Mechanism {
  int states = 0;
  std::vector<int> parent_states;
  std::vector<double> table;

  bool is_marginal() const noexcept { return parent_states.empty(); }
  std::size_t rows() const noexcept;
  std::span<const double> row(std::size_t config) const {
    return {table.data() + config * static_cast<std::size_t>(states), static_cast<std::size_t>(states)};
  }

  friend bool operator==(const Mechanism&, const Mechanism&) = default;
};

using Assignment = std::vector<Window>;

/// Per-node reference and current mechanisms over one view DAG, sharing a
/// discretization.
class MechanismSet {
 public:
  /// Constructs from explicit tables; validates shapes and normalization.
  MechanismSet(ViewGraph graph, std::vector<Mechanism> ref, std::vector<Mechanism> cur);

  const ViewGraph& graph() const noexcept { return graph_; }
  const std::vector<std::string>& nodes() const noexcept { return graph_.nodes; }
  std::size_t size() const noexcept { return graph_.size(); }
  int index_of(std::string_view node) const;  // throws UnknownNode

  const Mechanism& mechanism(std::size_t node, Window window) const {
    return window == Window::Ref ? ref_[node] : cur_[node];
  }

  Assignment all(Window window) const { return Assignment(size(), window); }

  // Populated by fit_mechanisms.
  Discretization discretization;
  std::vector<std::string> excluded;
  std::size_t ref_rows = 0;
  std::size_t cur_rows = 0;
  double smoothing = 0.0;

  friend bool operator==(const MechanismSet& a, const MechanismSet& b) {
    return a.graph_.nodes == b.graph_.nodes && a.graph_.parents == b.graph_.parents && a.ref_ == b.ref_ &&
           a.cur_ == b.cur_ && a.discretization == b.discretization;
  }

 private:
  ViewGraph graph_;
  std::vector<Mechanism> ref_;
  std::vector<Mechanism> cur_;
};

struct FitOptions {
  int bins = 8;
  double smoothing = 1.0;
};

/// Fits reference and current mechanisms for every node of a view that has
/// data; nodes without data are dropped from the DAG and listed in
/// `excluded`. Bins are fit on the reference window. A parent configuration
/// observed in only one window takes that window's row in both tables, since
/// the other window carries no evidence of a mechanism change there.
MechanismSet fit_mechanisms(const SystemMap& map, const WindowedDataset& ds, const ViewKind& view,
                            const FitOptions& options = {});

struct InferenceOptions {
  double state_limit = 1e6;
};

/// Exact marginal of `target` with each node's mechanism taken from the
/// window in `assignment`, by variable elimination over the target's
/// ancestors (min-degree order, ties by name).
std::vector<double> target_marginal(const MechanismSet& mech, const Assignment& assignment,
                                    std::size_t target, const InferenceOptions& options = {});
std::vector<double> target_marginal(const MechanismSet& mech, const Assignment& assignment,
                                    std::string_view target, const InferenceOptions& options = {});

/// Histogram of `samples` ancestral draws of `target`.
std::vector<double> sample_marginal(const MechanismSet& mech, const Assignment& assignment,
                                    std::size_t target, std::size_t samples, std::uint64_t seed);

}  // namespace msm
