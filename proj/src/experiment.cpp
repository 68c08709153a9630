#include "crowdrank/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "crowdrank/error.hpp"
#include "crowdrank/inference.hpp"

namespace crowdrank {

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

TrialResult run_trial(const SynthConfig& config, const EstimateOptions& options, double xi_range,
                      int max_degree) {
  TrialResult out;
  out.seed = config.seed;
  out.task_count = config.task_count;

  auto instance = generate(config);
  ObservationSet observations = std::move(instance.observations);
  if (max_degree > 0) {
    const auto graph = build_graph(observations);
    observations = sparsify(graph, observations, max_degree, config.seed ^ 0x5eed5eedULL).observations;
  }
  const auto& truth = instance.labels;
  out.mean_skill = instance.skills.values.mean();
  out.pe_majority = prediction_error(majority_vote(observations), truth).rate;
  out.pe_oracle = prediction_error(plug_in_predict(observations, instance.skills), truth).rate;

  try {
    auto corr = estimate_correlations(observations);
    if (xi_range > 0.0) corr = inject_correlation_noise(corr, xi_range, config.seed ^ 0x0123abcdULL);
    EstimateOptions opts = options;
    opts.solver.seed = config.seed;
    const auto est = estimate_skills(corr, observations.tasks_per_worker(), opts);
    out.pe_pipeline = prediction_error(plug_in_predict(observations, est.skills), truth).rate;
    out.skill_error_inf = (est.skills.values - instance.skills.values).cwiseAbs().maxCoeff();
  } catch (const Error& e) {
    out.pipeline_ok = false;
    out.error = e.what();
    out.pe_pipeline = std::numeric_limits<double>::quiet_NaN();
    out.skill_error_inf = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<SweepPoint> run_sweep(const SweepSpec& spec, int threads, std::vector<TrialResult>* trials) {
  require(!spec.seeds.empty(), ErrorKind::kParameter, "sweep needs at least one seed");
  require(!spec.task_counts.empty(), ErrorKind::kParameter, "sweep needs at least one task count");
  require(spec.max_degrees.empty() || spec.task_counts.size() == 1, ErrorKind::kParameter,
          "a max-degree sweep takes exactly one task count");
  spec.base.validate();

  struct Job {
    double x;
    SynthConfig config;
    int max_degree;
  };
  std::vector<Job> jobs;
  const bool degree_axis = !spec.max_degrees.empty();
  const std::vector<int>& axis = degree_axis ? spec.max_degrees : spec.task_counts;
  for (int value : axis) {
    for (auto seed : spec.seeds) {
      SynthConfig cfg = spec.base;
      cfg.seed = seed;
      cfg.task_count = degree_axis ? spec.task_counts.front() : value;
      jobs.push_back({static_cast<double>(value), cfg, degree_axis ? value : 0});
    }
  }

  std::vector<TrialResult> results(jobs.size());
  std::vector<std::string> fatal(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        results[k] = run_trial(jobs[k].config, spec.options, spec.xi_range, jobs[k].max_degree);
      } catch (const std::exception& e) {
        fatal[k] = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    // Generation errors are configuration errors; surface the first one.
    if (!fatal[k].empty()) fail(ErrorKind::kParameter, fatal[k]);
  }

  std::map<double, std::vector<std::size_t>> by_x;
  for (std::size_t k = 0; k < jobs.size(); ++k) by_x[jobs[k].x].push_back(k);
  const std::string prefix = spec.label.empty() ? "" : spec.label + ":";
  std::vector<SweepPoint> rows;
  for (auto& [x, idx] : by_x) {
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return results[a].seed < results[b].seed; });
    std::vector<double> pipe, mv, oracle;
    int failures = 0;
    for (auto k : idx) {
      if (results[k].pipeline_ok) {
        pipe.push_back(results[k].pe_pipeline);
      } else {
        ++failures;
      }
      mv.push_back(results[k].pe_majority);
      oracle.push_back(results[k].pe_oracle);
    }
    auto add = [&](const std::string& name, const std::vector<double>& v, int fails) {
      const auto [m, s] = mean_std(v);
      rows.push_back({x, prefix + name, m, s, static_cast<int>(v.size()), fails});
    };
    add("pipeline", pipe, failures);
    add("majority", mv, 0);
    add("oracle", oracle, 0);
  }
  if (trials) {
    trials->clear();
    for (auto& [x, idx] : by_x)
      for (auto k : idx) trials->push_back(results[k]);
  }
  return rows;
}

}  // namespace crowdrank
