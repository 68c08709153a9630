#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crowdrank/pipeline.hpp"
#include "crowdrank/synthgen.hpp"

namespace crowdrank {

/// Outcome of one synthetic instance run through the full pipeline.
struct TrialResult {
  std::uint64_t seed = 0;
  int task_count = 0;
  double pe_pipeline = 0.0;
  double pe_majority = 0.0;
  double pe_oracle = 0.0;     // plug-in rule with the true skills
  double skill_error_inf = 0.0;
  double mean_skill = 0.0;    // of the ground truth
  bool pipeline_ok = true;    // false when estimation threw
  std::string error;
};

/// Generates the instance, optionally sparsifies it (max_degree > 0) and
/// perturbs its correlations by +-xi_range, then estimates skills and scores
/// the three prediction rules. An estimation failure is recorded in `error`
/// with pe_pipeline = NaN instead of being thrown.
TrialResult run_trial(const SynthConfig& config, const EstimateOptions& options,
                      double xi_range = 0.0, int max_degree = 0);

struct SweepPoint {
  double x = 0.0;
  std::string series;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over seeds
  int runs = 0;
  int failures = 0;  // seeds whose estimation threw (excluded from mean/std)
};

struct SweepSpec {
  SynthConfig base;
  EstimateOptions options;
  std::vector<int> task_counts;
  std::vector<int> max_degrees;  // optional sparsification axis; empty = none
  std::vector<std::uint64_t> seeds;
  double xi_range = 0.0;
  std::string label;  // prefix for series names
};

/// Runs every (x, seed) pair, `threads` instances at a time, and aggregates
/// into tidy rows for the pipeline, majority-vote and oracle series. Rows are
/// ordered by x then series; per-seed results are sorted by seed first so the
/// output does not depend on scheduling.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec, int threads,
                                  std::vector<TrialResult>* trials = nullptr);

/// Mean and sample standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

}  // namespace crowdrank
