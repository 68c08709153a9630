#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "crowdrank/correlation.hpp"
#include "crowdrank/interaction_graph.hpp"
#include "crowdrank/observation_set.hpp"

namespace testing {

using crowdrank::CorrelationEntry;
using crowdrank::CorrelationEstimate;
using crowdrank::Edge;
using crowdrank::InteractionGraph;

inline InteractionGraph graph_of(int w, const std::vector<std::pair<int, int>>& pairs, std::int64_t n = 1) {
  std::vector<Edge> edges;
  for (auto [i, j] : pairs) edges.push_back({i, j, n});
  return InteractionGraph::from_edges(w, edges);
}

inline InteractionGraph ring(int w, std::int64_t n = 1) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < w; ++i) e.emplace_back(i, (i + 1) % w);
  return graph_of(w, e, n);
}

inline InteractionGraph clique(int w, std::int64_t n = 1) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < w; ++i)
    for (int j = i + 1; j < w; ++j) e.emplace_back(i, j);
  return graph_of(w, e, n);
}

inline InteractionGraph star3(int w, std::int64_t n = 1) {
  std::vector<std::pair<int, int>> e;
  for (int j = 1; j < w; ++j) e.emplace_back(0, j);
  e.emplace_back(1, 2);
  return graph_of(w, e, n);
}

/// c_ij = s_i s_j + delta_ij on every edge of g, n taken from g.
inline CorrelationEstimate exact_corr(const InteractionGraph& g, const Eigen::VectorXd& s,
                                      int classes = 2) {
  std::vector<CorrelationEntry> entries;
  for (const auto& e : g.edges()) entries.push_back({e.i, e.j, s(e.i) * s(e.j), e.n});
  return CorrelationEstimate::from_entries(g.worker_count(), classes, entries);
}

/// Connected non-bipartite random graph: a random spanning tree plus random
/// extra edges, retried until an odd cycle exists. Counts in [1, max_n].
inline InteractionGraph random_identifiable_graph(int w, std::mt19937_64& rng, double extra_p = 0.2,
                                                  std::int64_t max_n = 5) {
  std::uniform_int_distribution<std::int64_t> count(1, max_n);
  std::bernoulli_distribution extra(extra_p);
  for (;;) {
    std::vector<Edge> edges;
    std::vector<std::vector<char>> adj(static_cast<std::size_t>(w), std::vector<char>(static_cast<std::size_t>(w), 0));
    for (int v = 1; v < w; ++v) {
      std::uniform_int_distribution<int> parent(0, v - 1);
      const int u = parent(rng);
      edges.push_back({u, v, count(rng)});
      adj[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
    }
    for (int i = 0; i < w; ++i)
      for (int j = i + 1; j < w; ++j)
        if (!adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] && extra(rng))
          edges.push_back({i, j, count(rng)});
    auto g = InteractionGraph::from_edges(w, edges);
    if (crowdrank::analyze_components(g).identifiable) return g;
  }
}

/// Brute-force bipartiteness: try every 2-coloring.
inline bool brute_force_bipartite(int w, const std::vector<std::pair<int, int>>& edges) {
  for (std::uint32_t mask = 0; mask < (1u << w); ++mask) {
    bool ok = true;
    for (auto [i, j] : edges) {
      if (((mask >> i) & 1u) == ((mask >> j) & 1u)) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

}  // namespace testing
