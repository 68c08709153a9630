#include "crowdrank/interaction_graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <unordered_map>

#include <Eigen/Sparse>

#include "crowdrank/error.hpp"

namespace crowdrank {

InteractionGraph InteractionGraph::from_edges(int worker_count, std::vector<Edge> edges) {
  require(worker_count >= 1, ErrorKind::kParameter, "graph needs at least one worker");
  for (auto& e : edges) {
    if (e.i > e.j) std::swap(e.i, e.j);
    require(e.i >= 0 && e.j < worker_count, ErrorKind::kParameter, "edge endpoint out of range");
    require(e.i != e.j, ErrorKind::kParameter, "self-loop in interaction graph");
    require(e.n > 0, ErrorKind::kParameter, "edge count must be positive");
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
      fail(ErrorKind::kParameter, "duplicate edge (" + std::to_string(edges[k].i) + ", " +
                                      std::to_string(edges[k].j) + ")");
    }
  }

  InteractionGraph g;
  g.worker_count_ = worker_count;
  g.edges_ = std::move(edges);
  g.offsets_.assign(static_cast<std::size_t>(worker_count) + 1, 0);
  for (const auto& e : g.edges_) {
    ++g.offsets_[static_cast<std::size_t>(e.i) + 1];
    ++g.offsets_[static_cast<std::size_t>(e.j) + 1];
  }
  for (std::size_t w = 1; w < g.offsets_.size(); ++w) g.offsets_[w] += g.offsets_[w - 1];
  g.adjacency_.resize(g.offsets_.back());
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) g.adjacency_[fill[static_cast<std::size_t>(e.j)]++] = {e.i, e.n};
  for (const auto& e : g.edges_) g.adjacency_[fill[static_cast<std::size_t>(e.i)]++] = {e.j, e.n};
  for (int w = 0; w < worker_count; ++w) {
    auto begin = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[w]);
    auto end = g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[w + 1]);
    std::sort(begin, end, [](const Neighbor& a, const Neighbor& b) { return a.worker < b.worker; });
  }
  return g;
}

std::span<const Neighbor> InteractionGraph::neighbors(int worker) const {
  require(worker >= 0 && worker < worker_count_, ErrorKind::kParameter, "worker out of range");
  const auto b = offsets_[static_cast<std::size_t>(worker)];
  const auto e = offsets_[static_cast<std::size_t>(worker) + 1];
  return std::span<const Neighbor>(adjacency_).subspan(b, e - b);
}

std::int64_t InteractionGraph::count(int i, int j) const {
  if (i == j) return 0;
  const auto nb = neighbors(i);
  auto it = std::lower_bound(nb.begin(), nb.end(), j,
                             [](const Neighbor& a, int w) { return a.worker < w; });
  return (it != nb.end() && it->worker == j) ? it->n : 0;
}

std::int64_t InteractionGraph::weighted_degree(int worker) const {
  std::int64_t total = 0;
  for (const auto& nb : neighbors(worker)) total += nb.n;
  return total;
}

int InteractionGraph::degree(int worker) const {
  return static_cast<int>(neighbors(worker).size());
}

int InteractionGraph::max_degree() const {
  int best = 0;
  for (int w = 0; w < worker_count_; ++w) best = std::max(best, degree(w));
  return best;
}

std::int64_t InteractionGraph::n_min() const {
  std::int64_t best = 0;
  for (const auto& e : edges_)
    if (best == 0 || e.n < best) best = e.n;
  return best;
}

double InteractionGraph::norm_inf() const {
  std::int64_t best = 0;
  for (int w = 0; w < worker_count_; ++w) best = std::max(best, weighted_degree(w));
  return static_cast<double>(best);
}

Eigen::MatrixXd InteractionGraph::dense_counts() const {
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(worker_count_, worker_count_);
  for (const auto& e : edges_) {
    n(e.i, e.j) = static_cast<double>(e.n);
    n(e.j, e.i) = static_cast<double>(e.n);
  }
  return n;
}

InteractionGraph build_graph(const ObservationSet& observations) {
  require(!observations.empty(), ErrorKind::kData, "no observations");
  const auto w = static_cast<std::uint64_t>(observations.worker_count());
  std::unordered_map<std::uint64_t, std::int64_t> counts;
  for (int t = 0; t < observations.task_count(); ++t) {
    const auto labels = observations.task_labels(t);
    for (std::size_t a = 0; a < labels.size(); ++a)
      for (std::size_t b = a + 1; b < labels.size(); ++b)
        ++counts[static_cast<std::uint64_t>(labels[a].worker) * w +
                 static_cast<std::uint64_t>(labels[b].worker)];
  }
  std::vector<Edge> edges;
  edges.reserve(counts.size());
  for (const auto& [key, n] : counts)
    edges.push_back({static_cast<int>(key / w), static_cast<int>(key % w), n});
  return InteractionGraph::from_edges(observations.worker_count(), std::move(edges));
}

ComponentReport analyze_components(const InteractionGraph& graph) {
  const int w = graph.worker_count();
  ComponentReport report;
  report.component_of.assign(static_cast<std::size_t>(w), -1);
  std::vector<int> color(static_cast<std::size_t>(w), -1);

  for (int root = 0; root < w; ++root) {
    if (report.component_of[root] >= 0) continue;
    const int id = static_cast<int>(report.components.size());
    std::vector<int> members;
    bool bipartite = true;
    std::queue<int> frontier;
    frontier.push(root);
    report.component_of[root] = id;
    color[root] = 0;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      members.push_back(u);
      for (const auto& nb : graph.neighbors(u)) {
        const int v = nb.worker;
        if (report.component_of[v] < 0) {
          report.component_of[v] = id;
          color[v] = 1 - color[u];
          frontier.push(v);
        } else if (color[v] == color[u]) {
          bipartite = false;
        }
      }
    }
    std::sort(members.begin(), members.end());
    report.components.push_back(std::move(members));
    report.bipartite.push_back(bipartite);
  }

  report.identifiable = true;
  for (std::size_t c = 0; c < report.components.size(); ++c)
    if (report.components[c].size() >= 2 && report.bipartite[c]) report.identifiable = false;
  return report;
}

Eigen::MatrixXd signless_laplacian(const InteractionGraph& graph, Weighting weighting) {
  const int w = graph.worker_count();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(w, w);
  for (const auto& e : graph.edges()) {
    const double weight = weighting == Weighting::kUnit ? 1.0 : static_cast<double>(e.n);
    l(e.i, e.j) += weight;
    l(e.j, e.i) += weight;
    l(e.i, e.i) += weight;
    l(e.j, e.j) += weight;
  }
  return l;
}

namespace {

// Smallest eigenvalue of the signless Laplacian restricted to one component.
double component_lambda_min(const InteractionGraph& graph, const std::vector<int>& members,
                            Weighting weighting) {
  const auto size = static_cast<int>(members.size());
  if (size < 2) return 0.0;
  std::unordered_map<int, int> local;
  for (int k = 0; k < size; ++k) local[members[k]] = k;

  auto weight_of = [&](const Neighbor& nb) {
    return weighting == Weighting::kUnit ? 1.0 : static_cast<double>(nb.n);
  };

  if (size <= kDenseEigenLimit) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(size, size);
    for (int k = 0; k < size; ++k) {
      for (const auto& nb : graph.neighbors(members[k])) {
        const double wt = weight_of(nb);
        l(k, local.at(nb.worker)) += wt;
        l(k, k) += wt;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  }

  // Shifted power iteration on (sigma I - L_s); sigma bounds the spectrum by
  // Gershgorin (diagonal plus off-diagonal row sum is twice the degree).
  std::vector<Eigen::Triplet<double>> triplets;
  double sigma = 0.0;
  for (int k = 0; k < size; ++k) {
    double deg = 0.0;
    for (const auto& nb : graph.neighbors(members[k])) {
      const double wt = weight_of(nb);
      triplets.emplace_back(k, local.at(nb.worker), -wt);
      deg += wt;
    }
    triplets.emplace_back(k, k, -deg);
    sigma = std::max(sigma, 2.0 * deg);
  }
  Eigen::SparseMatrix<double> shifted(size, size);
  shifted.setFromTriplets(triplets.begin(), triplets.end());
  for (int k = 0; k < size; ++k) shifted.coeffRef(k, k) += sigma;

  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(size, 1.0, 2.0).normalized();
  double estimate = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd next = shifted * v;
    const double rayleigh = v.dot(next);
    v = next.normalized();
    if (it > 0 && std::abs(rayleigh - estimate) <= 1e-13 * std::max(1.0, sigma)) {
      estimate = rayleigh;
      break;
    }
    estimate = rayleigh;
  }
  return sigma - estimate;
}

}  // namespace

double spectral_norm_estimate(const InteractionGraph& graph, int max_iters, double rel_tol) {
  const int w = graph.worker_count();
  if (graph.edge_count() == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Constant(w, 1.0 / std::sqrt(static_cast<double>(w)));
  double estimate = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(w);
    for (const auto& e : graph.edges()) {
      next(e.i) += static_cast<double>(e.n) * v(e.j);
      next(e.j) += static_cast<double>(e.n) * v(e.i);
    }
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    v = next / norm;
    if (it > 0 && std::abs(norm - estimate) <= rel_tol * norm) return norm;
    estimate = norm;
  }
  return estimate;
}

SpectralReport spectral_report(const InteractionGraph& graph, const ComponentReport& components) {
  require(graph.edge_count() > 0, ErrorKind::kData, "no interactions");
  SpectralReport report;
  report.n_min = graph.n_min();
  report.norm_inf = graph.norm_inf();
  if (graph.worker_count() <= kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph.dense_counts(),
                                                          Eigen::EigenvaluesOnly);
    report.norm_two = solver.eigenvalues().cwiseAbs().maxCoeff();
  } else {
    report.norm_two = spectral_norm_estimate(graph, 5000, 1e-14);
  }

  // Unit-weight eigenvalues are compared against the unit-weight norm scale.
  const double unit_scale = std::max(1.0, report.norm_two / static_cast<double>(report.n_min));
  for (const auto& members : components.components) {
    double weighted = component_lambda_min(graph, members, Weighting::kCounts);
    double unit = component_lambda_min(graph, members, Weighting::kUnit);
    if (weighted < kEigenZeroTolerance * report.norm_two) weighted = 0.0;
    if (unit < kEigenZeroTolerance * unit_scale) unit = 0.0;
    report.lambda_min_signless.push_back(weighted);
    report.lambda_min_unit.push_back(unit);
  }
  return report;
}

SpectralReport spectral_report(const InteractionGraph& graph) {
  return spectral_report(graph, analyze_components(graph));
}

}  // namespace crowdrank
