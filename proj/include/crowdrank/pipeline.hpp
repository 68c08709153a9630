#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crowdrank/correlation.hpp"
#include "crowdrank/interaction_graph.hpp"
#include "crowdrank/observation_set.hpp"
#include "crowdrank/rank1_solver.hpp"
#include "crowdrank/sign_recovery.hpp"

namespace crowdrank {

struct EstimateOptions {
  SolverConfig solver;
  std::optional<double> spammer_delta;  // drop edges with |c| below delta + sqrt(log W / n)
  std::int64_t min_count = 1;           // drop edges with fewer shared tasks
  bool force = false;                   // run on non-identifiable data anyway
  double hoeffding_delta = 0.05;        // confidence for the reported radius
  bool strict_signs = false;            // zero-correlation tree edge is an error instead of a split
};

struct EstimateResult {
  SkillVector skills;      // signed, inside [-1/(M-1), 1]
  SkillVector magnitudes;  // |s| from the solver, 0 for workers with no partner
  SignAssignment signs;
  ComponentReport components;
  SpectralReport spectral;
  SolverTrace trace;
  CorrelationEstimate correlations;  // after filtering, signed
  InteractionGraph graph;            // after filtering
  std::vector<int> tasks_per_worker;
  double hoeffding_radius = 0.0;
  std::optional<double> perturbation_bound;  // needs one connected non-bipartite component
};

/// Correlations, optional edge filtering, identifiability check, rank-one
/// solve on |c|, sign recovery and a final clamp to the model range.
/// Throws kNotIdentifiable on a bipartite component unless `force` is set.
EstimateResult estimate_skills(const ObservationSet& observations, const EstimateOptions& options);

/// Same pipeline on a precomputed correlation estimate (e.g. with injected noise).
EstimateResult estimate_skills(const CorrelationEstimate& corr, const std::vector<int>& tasks_per_worker,
                               const EstimateOptions& options);

/// Class-index predictions of the plug-in rule with estimated skills.
/// Skills are nudged inside the open interval so weights stay finite.
std::vector<int> plug_in_predict(const ObservationSet& observations, const SkillVector& skills);

}  // namespace crowdrank
