#include "crowdrank/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "crowdrank/error.hpp"

namespace crowdrank {

const char* to_string(GraphFamily family) noexcept {
  switch (family) {
    case GraphFamily::kClique: return "clique";
    case GraphFamily::kStar3: return "star3";
    case GraphFamily::kRing: return "ring";
    case GraphFamily::kGridPlusEdge: return "grid_plus_edge";
    case GraphFamily::kErdosRenyi: return "erdos_renyi";
  }
  return "unknown";
}

GraphFamily parse_graph_family(const std::string& name) {
  for (auto f : {GraphFamily::kClique, GraphFamily::kStar3, GraphFamily::kRing,
                 GraphFamily::kGridPlusEdge, GraphFamily::kErdosRenyi}) {
    if (name == to_string(f)) return f;
  }
  fail(ErrorKind::kParameter, "unknown graph family '" + name + "'");
}

const char* to_string(AssignmentMode mode) noexcept {
  switch (mode) {
    case AssignmentMode::kAuto: return "auto";
    case AssignmentMode::kEdgeRoundRobin: return "round_robin";
    case AssignmentMode::kAllWorkers: return "all_workers";
  }
  return "unknown";
}

AssignmentMode parse_assignment_mode(const std::string& name) {
  for (auto m : {AssignmentMode::kAuto, AssignmentMode::kEdgeRoundRobin, AssignmentMode::kAllWorkers}) {
    if (name == to_string(m)) return m;
  }
  fail(ErrorKind::kParameter, "unknown assignment mode '" + name + "'");
}

void SynthConfig::validate() const {
  require(worker_count >= 2, ErrorKind::kParameter, "need at least two workers");
  require(task_count >= 1, ErrorKind::kParameter, "need at least one task");
  require(class_count >= 2, ErrorKind::kParameter, "need at least two classes");
  if (graph_family == GraphFamily::kRing || graph_family == GraphFamily::kStar3 ||
      graph_family == GraphFamily::kGridPlusEdge) {
    require(worker_count >= 3, ErrorKind::kParameter,
            std::string(to_string(graph_family)) + " needs at least three workers");
  }
  if (graph_family == GraphFamily::kErdosRenyi) {
    require(edge_probability > 0.0 && edge_probability <= 1.0, ErrorKind::kParameter,
            "edge probability must lie in (0, 1]");
  }
  if (skills.kind == SkillDistribution::Kind::kBeta) {
    require(skills.a > 0.0 && skills.b > 0.0, ErrorKind::kParameter,
            "beta parameters must be positive");
  }
  if (skills.kind == SkillDistribution::Kind::kExplicit) {
    require(static_cast<int>(skills.values.size()) == worker_count, ErrorKind::kParameter,
            "explicit skill vector length must equal the worker count");
  }
}

InteractionGraph make_family_graph(GraphFamily family, int worker_count, double edge_probability,
                                   std::uint64_t seed) {
  const int w = worker_count;
  std::vector<Edge> edges;
  switch (family) {
    case GraphFamily::kClique:
      for (int i = 0; i < w; ++i)
        for (int j = i + 1; j < w; ++j) edges.push_back({i, j, 1});
      break;
    case GraphFamily::kStar3:
      require(w >= 3, ErrorKind::kParameter, "star3 needs at least three workers");
      for (int j = 1; j < w; ++j) edges.push_back({0, j, 1});
      edges.push_back({1, 2, 1});
      break;
    case GraphFamily::kRing:
      require(w >= 3, ErrorKind::kParameter, "ring needs at least three workers");
      for (int i = 0; i < w; ++i) edges.push_back({std::min(i, (i + 1) % w), std::max(i, (i + 1) % w), 1});
      break;
    case GraphFamily::kGridPlusEdge: {
      require(w >= 3, ErrorKind::kParameter, "grid needs at least three workers");
      const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(w))));
      std::set<std::pair<int, int>> present;
      for (int k = 0; k < w; ++k) {
        if ((k % cols) + 1 < cols && k + 1 < w) present.insert({k, k + 1});
        if (k + cols < w) present.insert({k, k + cols});
      }
      // The grid is bipartite under the (row + col) parity coloring; joining
      // the first same-colored non-adjacent pair closes an odd cycle.
      auto parity = [cols](int k) { return (k / cols + k % cols) % 2; };
      bool added = false;
      for (int i = 0; i < w && !added; ++i) {
        for (int j = i + 1; j < w && !added; ++j) {
          if (parity(i) == parity(j) && !present.count({i, j})) {
            present.insert({i, j});
            added = true;
          }
        }
      }
      for (const auto& [i, j] : present) edges.push_back({i, j, 1});
      break;
    }
    case GraphFamily::kErdosRenyi: {
      std::mt19937_64 rng(seed);
      std::bernoulli_distribution coin(edge_probability);
      for (int i = 0; i < w; ++i)
        for (int j = i + 1; j < w; ++j)
          if (coin(rng)) edges.push_back({i, j, 1});
      break;
    }
  }
  return InteractionGraph::from_edges(w, std::move(edges));
}

namespace {

double sample_beta(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

Eigen::VectorXd sample_skills(const SynthConfig& config, std::mt19937_64& rng) {
  const int w = config.worker_count;
  const double m = static_cast<double>(config.class_count);
  Eigen::VectorXd s(w);
  const auto& dist = config.skills;
  switch (dist.kind) {
    case SkillDistribution::Kind::kUniformGrid: {
      std::vector<double> grid(static_cast<std::size_t>(w));
      for (int k = 0; k < w; ++k)
        grid[static_cast<std::size_t>(k)] = w == 1 ? dist.a : dist.a + (dist.b - dist.a) * k / (w - 1);
      if (config.shuffle_skills) std::shuffle(grid.begin(), grid.end(), rng);
      for (int k = 0; k < w; ++k) s(k) = grid[static_cast<std::size_t>(k)];
      break;
    }
    case SkillDistribution::Kind::kBeta:
      // Beta draws are worker accuracies p; s = (M p - 1) / (M - 1).
      for (int k = 0; k < w; ++k) s(k) = (m * sample_beta(rng, dist.a, dist.b) - 1.0) / (m - 1.0);
      break;
    case SkillDistribution::Kind::kConstant:
      s.setConstant(dist.a);
      break;
    case SkillDistribution::Kind::kExplicit:
      for (int k = 0; k < w; ++k) s(k) = dist.values[static_cast<std::size_t>(k)];
      break;
  }
  const double floor = -1.0 / (m - 1.0);
  for (int k = 0; k < w; ++k) {
    require(s(k) >= floor - 1e-12 && s(k) <= 1.0 + 1e-12, ErrorKind::kParameter,
            "skill " + std::to_string(s(k)) + " outside the model range");
  }
  return s;
}

InteractionGraph graph_or_empty(const ObservationSet& observations) {
  if (observations.empty()) return InteractionGraph::from_edges(observations.worker_count(), {});
  return build_graph(observations);
}

}  // namespace

SynthInstance generate(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  const int w = config.worker_count;
  const int t_count = config.task_count;
  const int m = config.class_count;

  SynthInstance out;
  out.skills.values = sample_skills(config, rng);
  out.skills.class_count = m;
  out.design_graph = make_family_graph(config.graph_family, w, config.edge_probability, rng());

  out.assignment = config.assignment;
  if (out.assignment == AssignmentMode::kAuto) {
    out.assignment = config.graph_family == GraphFamily::kClique ? AssignmentMode::kAllWorkers
                                                                 : AssignmentMode::kEdgeRoundRobin;
  }
  const auto edges = out.design_graph.edges();
  if (out.assignment == AssignmentMode::kEdgeRoundRobin) {
    require(!edges.empty(), ErrorKind::kParameter, "design graph has no edges");
    require(static_cast<std::size_t>(t_count) >= edges.size(), ErrorKind::kParameter,
            "infeasible config: " + std::to_string(t_count) + " tasks cannot cover " +
                std::to_string(edges.size()) + " edges");
  }

  std::uniform_int_distribution<int> pick_class(0, m - 1);
  std::uniform_int_distribution<int> pick_other(0, m - 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Observation> triples;
  out.labels.resize(static_cast<std::size_t>(t_count));

  auto label_for = [&](int worker, int truth) {
    const double p = ((m - 1) * out.skills.values(worker) + 1.0) / m;
    if (unit(rng) < p) return truth;
    const int other = pick_other(rng);
    return other >= truth ? other + 1 : other;
  };

  for (int t = 0; t < t_count; ++t) {
    const int truth = pick_class(rng);
    out.labels[static_cast<std::size_t>(t)] = truth;
    if (out.assignment == AssignmentMode::kAllWorkers) {
      for (int i = 0; i < w; ++i) triples.push_back({i, t, label_for(i, truth)});
    } else {
      const auto& e = edges[static_cast<std::size_t>(t) % edges.size()];
      triples.push_back({e.i, t, label_for(e.i, truth)});
      triples.push_back({e.j, t, label_for(e.j, truth)});
    }
  }
  out.observations = ObservationSet::create(w, t_count, m, std::move(triples));
  return out;
}

CorrelationEstimate inject_correlation_noise(const CorrelationEstimate& corr, double xi_range,
                                             std::uint64_t seed) {
  require(xi_range >= 0.0, ErrorKind::kParameter, "noise range must be nonnegative");
  if (xi_range == 0.0) return corr;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xi(-xi_range, xi_range);
  return corr.transform([&](const CorrelationEntry& e) { return e.c + xi(rng); });
}

SparsifyResult sparsify(const InteractionGraph& graph, const ObservationSet& observations,
                        int max_degree, std::uint64_t seed) {
  require(max_degree >= 1, ErrorKind::kParameter, "max_degree must be at least 1");
  require(graph.worker_count() == observations.worker_count(), ErrorKind::kParameter,
          "graph and observations disagree on the worker count");
  if (graph.max_degree() <= max_degree) return {graph, observations};

  std::mt19937_64 rng(seed);
  std::vector<std::vector<Observation>> by_task(static_cast<std::size_t>(observations.task_count()));
  for (const auto& o : observations.triples()) by_task[static_cast<std::size_t>(o.task)].push_back(o);

  auto rebuild = [&] {
    std::vector<Observation> triples;
    for (const auto& labels : by_task) triples.insert(triples.end(), labels.begin(), labels.end());
    return ObservationSet::create(observations.worker_count(), observations.task_count(),
                                  observations.class_count(), std::move(triples));
  };

  ObservationSet current = observations;
  InteractionGraph g = graph_or_empty(current);
  while (g.max_degree() > max_degree) {
    int u = 0;
    for (int w = 1; w < g.worker_count(); ++w)
      if (g.degree(w) > g.degree(u)) u = w;
    const auto nbs = g.neighbors(u);
    std::uniform_int_distribution<std::size_t> pick(0, nbs.size() - 1);
    const int v = nbs[pick(rng)].worker;

    for (auto& labels : by_task) {
      const bool has_u = std::any_of(labels.begin(), labels.end(), [&](const Observation& o) { return o.worker == u; });
      const bool has_v = std::any_of(labels.begin(), labels.end(), [&](const Observation& o) { return o.worker == v; });
      if (!has_u || !has_v) continue;
      std::erase_if(labels, [&](const Observation& o) { return o.worker == u; });
      if (labels.size() < 2) labels.clear();
    }
    current = rebuild();
    g = graph_or_empty(current);
  }
  return {std::move(g), std::move(current)};
}

}  // namespace crowdrank
