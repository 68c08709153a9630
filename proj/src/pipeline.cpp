#include "crowdrank/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crowdrank/error.hpp"
#include "crowdrank/inference.hpp"

namespace crowdrank {

namespace {

std::string describe_component(const std::vector<int>& members) {
  std::string out = "{";
  const std::size_t shown = std::min<std::size_t>(members.size(), 8);
  for (std::size_t k = 0; k < shown; ++k) {
    if (k) out += ", ";
    out += std::to_string(members[k]);
  }
  if (shown < members.size()) out += ", ...";
  return out + "}";
}

}  // namespace

EstimateResult estimate_skills(const CorrelationEstimate& corr_in,
                               const std::vector<int>& tasks_per_worker,
                               const EstimateOptions& options) {
  options.solver.validate();
  require(options.min_count >= 1, ErrorKind::kParameter, "min_count must be at least 1");
  const int w = corr_in.worker_count();
  const int m = corr_in.class_count();

  EstimateResult out;
  out.tasks_per_worker = tasks_per_worker;
  CorrelationEstimate corr = corr_in;
  InteractionGraph graph = corr.graph();
  if (options.min_count > 1) std::tie(corr, graph) = drop_sparse_edges(corr, options.min_count, graph);
  if (options.spammer_delta) std::tie(corr, graph) = threshold_spammers(corr, *options.spammer_delta, graph);
  require(graph.edge_count() > 0, ErrorKind::kData, "no interactions: no two workers share a task");

  out.components = analyze_components(graph);
  if (!out.components.identifiable && !options.force) {
    for (std::size_t c = 0; c < out.components.components.size(); ++c) {
      const auto& members = out.components.components[c];
      if (members.size() >= 2 && out.components.bipartite[c]) {
        fail(ErrorKind::kNotIdentifiable,
             "skills are not identifiable: component " + describe_component(members) +
                 " is bipartite (no odd cycle); rerun with --force for a best-effort estimate");
      }
    }
  }
  out.spectral = spectral_report(graph, out.components);
  out.hoeffding_radius = hoeffding_radius(graph.n_min(), static_cast<double>(graph.degree_sum()),
                                          options.hoeffding_delta);
  if (out.components.identifiable && out.spectral.lambda_min_unit.size() == 1) {
    out.perturbation_bound = perturbation_bound(graph, out.spectral, options.solver.kappa,
                                                options.solver.cap_k, out.hoeffding_radius);
  }

  // Magnitudes come from the rank-one fit to |c|; signs are recovered after.
  const auto magnitude_corr = corr.transform([](const CorrelationEntry& e) { return std::abs(e.c); });
  auto solved = solve(magnitude_corr, graph, options.solver);
  out.trace = std::move(solved.trace);
  out.magnitudes = std::move(solved.skills);
  out.magnitudes.class_count = m;
  out.magnitudes.magnitude_only = true;
  for (int i = 0; i < w; ++i) {
    const auto comp = static_cast<std::size_t>(out.components.component_of[static_cast<std::size_t>(i)]);
    if (out.components.components[comp].size() < 2) out.magnitudes.values(i) = 0.0;
    out.magnitudes.values(i) = std::max(0.0, out.magnitudes.values(i));
  }

  auto signed_skills = recover_signs(
      out.magnitudes, corr, graph, options.strict_signs ? ZeroEdgePolicy::kError : ZeroEdgePolicy::kSplitInsignificant);
  out.signs = std::move(signed_skills.signs);
  out.skills = std::move(signed_skills.skills);
  out.skills.values = out.skills.values.cwiseMax(out.skills.lower_bound()).cwiseMin(1.0);
  out.correlations = std::move(corr);
  out.graph = std::move(graph);
  return out;
}

EstimateResult estimate_skills(const ObservationSet& observations, const EstimateOptions& options) {
  require(!observations.empty(), ErrorKind::kData, "no observations");
  return estimate_skills(estimate_correlations(observations), observations.tasks_per_worker(), options);
}

std::vector<int> plug_in_predict(const ObservationSet& observations, const SkillVector& skills) {
  // Keep weights finite: an estimate of exactly 1 (or the floor) would let a
  // single worker override everyone else.
  constexpr double kMargin = 1e-6;
  SkillVector clipped = skills;
  clipped.class_count = observations.class_count();
  clipped.values = skills.values.cwiseMax(clipped.lower_bound() + kMargin).cwiseMin(1.0 - kMargin);
  return map_predict_multiclass(observations, clipped);
}

}  // namespace crowdrank
