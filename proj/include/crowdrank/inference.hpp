#pragma once

#include <vector>

#include <Eigen/Dense>

#include "crowdrank/observation_set.hpp"
#include "crowdrank/rank1_solver.hpp"

namespace crowdrank {

/// Binary predictions use +1 / -1 with 0 for tasks nobody labeled.
inline constexpr int kAbstainBinary = 0;
/// Class-index predictions use -1 for tasks nobody labeled.
inline constexpr int kAbstainClass = -1;

/// v_i = log((1 + s_i) / (1 - s_i)). Throws for |s_i| >= 1.
Eigen::VectorXd log_odds_weights(const SkillVector& skills);

/// Per task, the +-1 label with the larger total log-odds weight; ties go to +1.
std::vector<int> map_predict_binary(const ObservationSet& observations, const SkillVector& skills);

/// Per task, the class with the larger total weight
/// v_i = log((M-1) p_i / (1 - p_i)), p_i = ((M-1) s_i + 1) / M; ties go to
/// the lowest class index.
std::vector<int> map_predict_multiclass(const ObservationSet& observations,
                                        const SkillVector& skills);

/// Weighted plurality vote with explicit per-worker weights (class indices).
std::vector<int> weighted_vote(const ObservationSet& observations, const Eigen::VectorXd& weights);

/// Per-task plurality vote (class indices), lowest index on ties.
std::vector<int> majority_vote(const ObservationSet& observations);

struct CommitteePotential {
  double phi = 0.0;
  double error_upper = 1.0;  // exp(-phi / 2)
  double error_lower = 0.0;  // 3 / (4 (1 + exp(2 phi + 4 sqrt(phi))))
};

/// Phi = sum_i s_i log((1 + s_i) / (1 - s_i)) and the resulting bounds on the
/// optimal rule's per-task error.
CommitteePotential committee_potential(const SkillVector& skills);

/// sum_i 2 delta_i with delta_i = max(|(1+s^_i)/(1+s_i) - 1|, |(1-s^_i)/(1-s_i) - 1|):
/// bound on ||v(s) - v(s^)||_1 from the multiplicative skill error.
double weight_error_bound(const SkillVector& skills_true, const SkillVector& skills_est);

/// Fraction of non-abstained tasks whose prediction differs from the truth.
struct PredictionError {
  double rate = 0.0;
  int errors = 0;
  int scored = 0;
  int abstained = 0;
};

/// `predicted` and `truth` are class indices; entries equal to kAbstainClass
/// in `predicted` are skipped.
PredictionError prediction_error(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Converts +-1/0 binary predictions to class indices (abstain -> kAbstainClass).
std::vector<int> binary_to_classes(const std::vector<int>& signs);

}  // namespace crowdrank
