#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "crowdrank/interaction_graph.hpp"
#include "crowdrank/observation_set.hpp"

namespace crowdrank {

/// Empirical correlation of one worker pair (i < j) over its n shared tasks.
struct CorrelationEntry {
  int i = 0;
  int j = 0;
  double c = 0.0;
  std::int64_t n = 0;
};

/// Sparse symmetric correlation matrix. Each unordered pair is stored once,
/// so lookups are symmetric by construction.
class CorrelationEstimate {
 public:
  CorrelationEstimate() = default;

  static CorrelationEstimate from_entries(int worker_count, int class_count,
                                          std::vector<CorrelationEntry> entries);

  int worker_count() const noexcept { return worker_count_; }
  int class_count() const noexcept { return class_count_; }
  std::span<const CorrelationEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Entry for the pair {i, j}, in either order.
  const CorrelationEntry* find(int i, int j) const;
  std::optional<double> value(int i, int j) const;

  /// The interaction graph carried by the entries (edge weight n).
  InteractionGraph graph() const;

  /// Copy with every value replaced by f(entry).
  template <typename F>
  CorrelationEstimate transform(F f) const {
    CorrelationEstimate out = *this;
    for (auto& e : out.entries_) e.c = f(e);
    return out;
  }

  /// Copy keeping only the entries for which keep(entry) is true.
  template <typename Pred>
  CorrelationEstimate filter(Pred keep) const {
    std::vector<CorrelationEntry> kept;
    for (const auto& e : entries_)
      if (keep(e)) kept.push_back(e);
    return from_entries(worker_count_, class_count_, std::move(kept));
  }

 private:
  int worker_count_ = 0;
  int class_count_ = 2;
  std::vector<CorrelationEntry> entries_;  // sorted by (i, j)
};

/// C_ij = (1/N_ij) sum_t Y_it Y_jt with labels mapped to +-1. Requires M = 2.
CorrelationEstimate estimate_correlations_binary(const ObservationSet& observations);

/// C_ij = M/(M-1) * (fraction of shared tasks with equal labels) - 1/(M-1).
/// Reduces to the binary estimator when M = 2.
CorrelationEstimate estimate_correlations_multiclass(const ObservationSet& observations);

/// Binary estimator for M = 2, rescaled multiclass estimator otherwise.
CorrelationEstimate estimate_correlations(const ObservationSet& observations);

/// Drops every edge with |c| < delta + sqrt(log(W) / n) from both the
/// correlations and the graph.
std::pair<CorrelationEstimate, InteractionGraph> threshold_spammers(
    const CorrelationEstimate& corr, double delta, const InteractionGraph& graph);

/// Drops edges seen on fewer than min_count shared tasks.
std::pair<CorrelationEstimate, InteractionGraph> drop_sparse_edges(
    const CorrelationEstimate& corr, std::int64_t min_count, const InteractionGraph& graph);

/// Uniform deviation radius log(D / delta) / sqrt(N_min) for the empirical
/// correlations over all edges, holding with probability at least 1 - delta.
double hoeffding_radius(std::int64_t n_min, double degree_sum, double delta);

}  // namespace crowdrank
