#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crowdrank/correlation.hpp"
#include "crowdrank/interaction_graph.hpp"
#include "crowdrank/observation_set.hpp"
#include "crowdrank/rank1_solver.hpp"

namespace crowdrank {

enum class GraphFamily {
  kClique,
  kStar3,         // star centered on worker 0 plus the edge (1, 2)
  kRing,
  kGridPlusEdge,  // 2D grid plus one edge that closes an odd cycle
  kErdosRenyi,
};

const char* to_string(GraphFamily family) noexcept;
GraphFamily parse_graph_family(const std::string& name);

struct SkillDistribution {
  enum class Kind { kUniformGrid, kBeta, kConstant, kExplicit };

  Kind kind = Kind::kUniformGrid;
  double a = -0.3;  // grid: low end; beta: alpha; constant: value
  double b = 0.8;   // grid: high end; beta: beta
  std::vector<double> values;

  static SkillDistribution uniform_grid(double lo, double hi) { return {Kind::kUniformGrid, lo, hi, {}}; }
  static SkillDistribution beta(double alpha, double beta) { return {Kind::kBeta, alpha, beta, {}}; }
  static SkillDistribution constant(double c) { return {Kind::kConstant, c, c, {}}; }
  static SkillDistribution explicit_values(std::vector<double> v) {
    return {Kind::kExplicit, 0.0, 0.0, std::move(v)};
  }
};

/// How tasks are spread over the design graph.
enum class AssignmentMode {
  kAuto,            // all-workers for cliques, edge round-robin otherwise
  kEdgeRoundRobin,  // task t goes to edge t mod |E|, labeled by its two workers
  kAllWorkers,      // every worker labels every task
};

const char* to_string(AssignmentMode mode) noexcept;
AssignmentMode parse_assignment_mode(const std::string& name);

struct SynthConfig {
  GraphFamily graph_family = GraphFamily::kClique;
  double edge_probability = 0.3;  // Erdos-Renyi only
  int worker_count = 11;
  int task_count = 330;
  SkillDistribution skills;
  bool shuffle_skills = true;  // randomly permute grid/explicit skills over workers
  int class_count = 2;
  AssignmentMode assignment = AssignmentMode::kAuto;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthInstance {
  ObservationSet observations;
  SkillVector skills;              // ground truth
  std::vector<int> labels;         // ground-truth class per task
  InteractionGraph design_graph;   // graph the tasks were spread over
  AssignmentMode assignment = AssignmentMode::kEdgeRoundRobin;
};

/// Design graph of a family on `worker_count` workers.
InteractionGraph make_family_graph(GraphFamily family, int worker_count, double edge_probability,
                                   std::uint64_t seed);

/// Samples ground truth, skills and labels. Labels follow the single-coin /
/// homogeneous Dawid-Skene model: worker i is right with probability
/// p_i = ((M-1) s_i + 1) / M, otherwise uniform over the other classes.
SynthInstance generate(const SynthConfig& config);

/// Adds an independent uniform draw from [-xi, xi] to each edge value.
CorrelationEstimate inject_correlation_noise(const CorrelationEstimate& corr, double xi_range,
                                             std::uint64_t seed);

struct SparsifyResult {
  InteractionGraph graph;
  ObservationSet observations;
};

/// Repeatedly takes the highest-degree worker and deletes a random incident
/// edge (by removing that worker's labels on the tasks it shares with the
/// neighbor) until no worker has more than max_degree co-workers. Tasks left
/// with a single label are dropped.
SparsifyResult sparsify(const InteractionGraph& graph, const ObservationSet& observations,
                        int max_degree, std::uint64_t seed);

}  // namespace crowdrank
