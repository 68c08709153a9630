#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "crowdrank/observation_set.hpp"

namespace crowdrank {

/// Undirected weighted edge, i < j, weight n = number of shared tasks.
struct Edge {
  int i = 0;
  int j = 0;
  std::int64_t n = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbor {
  int worker = 0;
  std::int64_t n = 0;
};

/// Worker interaction graph: N_ij counts the tasks labeled by both i and j.
///
/// The count matrix is symmetric with zero diagonal and is stored as a sorted
/// edge list plus adjacency lists. Immutable after construction.
class InteractionGraph {
 public:
  InteractionGraph() = default;

  /// Edges may be given in any order and orientation; pairs must be distinct.
  static InteractionGraph from_edges(int worker_count, std::vector<Edge> edges);

  int worker_count() const noexcept { return worker_count_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Neighbor> neighbors(int worker) const;

  /// N_ij, zero when the pair never shared a task (and for i == j).
  std::int64_t count(int i, int j) const;

  /// N_i = sum_j N_ij.
  std::int64_t weighted_degree(int worker) const;
  /// Number of distinct co-workers.
  int degree(int worker) const;
  int max_degree() const;
  /// Sum of unweighted degrees, 2|E|.
  std::int64_t degree_sum() const noexcept { return 2 * static_cast<std::int64_t>(edges_.size()); }

  /// Smallest positive N_ij; 0 for an empty edge set.
  std::int64_t n_min() const;
  /// ||N||_inf, the largest weighted degree.
  double norm_inf() const;

  Eigen::MatrixXd dense_counts() const;

  /// Subgraph keeping only the edges for which keep(edge) is true.
  template <typename Pred>
  InteractionGraph filter_edges(Pred keep) const {
    std::vector<Edge> kept;
    for (const auto& e : edges_)
      if (keep(e)) kept.push_back(e);
    return from_edges(worker_count_, std::move(kept));
  }

 private:
  int worker_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbor> adjacency_;
};

/// Counts shared tasks for every worker pair.
InteractionGraph build_graph(const ObservationSet& observations);

/// Connected components (by positive-count edges) and per-component
/// bipartiteness.
struct ComponentReport {
  std::vector<std::vector<int>> components;  // each sorted, ordered by lowest member
  std::vector<int> component_of;             // worker -> component index
  std::vector<bool> bipartite;               // per component; singletons count as bipartite
  bool identifiable = false;                 // no multi-worker component is bipartite

  /// A component's skills can be estimated: it has an edge and an odd cycle.
  bool estimable(std::size_t component) const {
    return components[component].size() >= 2 && !bipartite[component];
  }
};

ComponentReport analyze_components(const InteractionGraph& graph);

enum class Weighting { kCounts, kUnit };

/// [L_s]_ij = N_ij (i != j), [L_s]_ii = sum_k N_ik. With kUnit every edge
/// weight is replaced by 1.
Eigen::MatrixXd signless_laplacian(const InteractionGraph& graph,
                                   Weighting weighting = Weighting::kCounts);

struct SpectralReport {
  std::vector<double> lambda_min_signless;  // per component, count-weighted L_s
  std::vector<double> lambda_min_unit;      // per component, unit-weight L_s
  std::int64_t n_min = 0;
  double norm_two = 0.0;  // ||N||_2
  double norm_inf = 0.0;  // ||N||_inf
};

/// Eigenvalues below this fraction of ||N||_2 are reported as exactly zero.
inline constexpr double kEigenZeroTolerance = 1e-10;
/// Components larger than this use shifted power iteration instead of a
/// dense eigensolve.
inline constexpr int kDenseEigenLimit = 2000;

SpectralReport spectral_report(const InteractionGraph& graph, const ComponentReport& components);
SpectralReport spectral_report(const InteractionGraph& graph);

/// ||N||_2 by power iteration (stops after max_iters or when the estimate's
/// relative change drops below rel_tol).
double spectral_norm_estimate(const InteractionGraph& graph, int max_iters = 200,
                              double rel_tol = 1e-10);

}  // namespace crowdrank
