#include "crowdrank/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crowdrank/error.hpp"

namespace crowdrank {

namespace {

void check_skill_size(const ObservationSet& observations, const SkillVector& skills) {
  require(skills.size() == observations.worker_count(), ErrorKind::kParameter,
          "skill vector has " + std::to_string(skills.size()) + " entries for " +
              std::to_string(observations.worker_count()) + " workers");
}

}  // namespace

Eigen::VectorXd log_odds_weights(const SkillVector& skills) {
  Eigen::VectorXd v(skills.size());
  for (int i = 0; i < skills.size(); ++i) {
    const double s = skills.values(i);
    require(std::abs(s) < 1.0, ErrorKind::kNumerical,
            "infinite log-odds weight for worker " + std::to_string(i) + " (s = " +
                std::to_string(s) + "); apply the boundary projection first");
    v(i) = std::log((1.0 + s) / (1.0 - s));
  }
  return v;
}

std::vector<int> weighted_vote(const ObservationSet& observations, const Eigen::VectorXd& weights) {
  require(weights.size() == observations.worker_count(), ErrorKind::kParameter,
          "weight vector size does not match worker count");
  const int m = observations.class_count();
  std::vector<int> out(static_cast<std::size_t>(observations.task_count()), kAbstainClass);
  std::vector<double> score(static_cast<std::size_t>(m));
  for (int t = 0; t < observations.task_count(); ++t) {
    const auto labels = observations.task_labels(t);
    if (labels.empty()) continue;
    std::fill(score.begin(), score.end(), 0.0);
    for (const auto& o : labels) score[static_cast<std::size_t>(o.label)] += weights(o.worker);
    int best = 0;
    for (int l = 1; l < m; ++l)
      if (score[static_cast<std::size_t>(l)] > score[static_cast<std::size_t>(best)]) best = l;
    out[static_cast<std::size_t>(t)] = best;
  }
  return out;
}

std::vector<int> map_predict_binary(const ObservationSet& observations, const SkillVector& skills) {
  require(observations.class_count() == 2, ErrorKind::kParameter,
          "binary prediction needs two-class data");
  check_skill_size(observations, skills);
  const auto classes = weighted_vote(observations, log_odds_weights(skills));
  std::vector<int> out(classes.size(), kAbstainBinary);
  for (std::size_t t = 0; t < classes.size(); ++t)
    if (classes[t] != kAbstainClass) out[t] = label_sign(classes[t]);
  return out;
}

std::vector<int> map_predict_multiclass(const ObservationSet& observations,
                                        const SkillVector& skills) {
  check_skill_size(observations, skills);
  const double m1 = static_cast<double>(observations.class_count() - 1);
  Eigen::VectorXd v(skills.size());
  for (int i = 0; i < skills.size(); ++i) {
    const double s = skills.values(i);
    // (M-1) p / (1 - p) with p = ((M-1) s + 1) / M simplifies to
    // ((M-1) s + 1) / (1 - s); for M = 2 this is exactly the binary log-odds.
    const double numerator = m1 * s + 1.0;
    const double denominator = 1.0 - s;
    require(numerator > 0.0 && denominator > 0.0, ErrorKind::kNumerical,
            "infinite weight for worker " + std::to_string(i) + " (accuracy 0 or 1)");
    v(i) = std::log(numerator / denominator);
  }
  return weighted_vote(observations, v);
}

std::vector<int> majority_vote(const ObservationSet& observations) {
  return weighted_vote(observations, Eigen::VectorXd::Ones(observations.worker_count()));
}

CommitteePotential committee_potential(const SkillVector& skills) {
  const Eigen::VectorXd v = log_odds_weights(skills);
  CommitteePotential out;
  out.phi = skills.values.dot(v);
  out.error_upper = std::exp(-0.5 * out.phi);
  out.error_lower = 3.0 / (4.0 * (1.0 + std::exp(2.0 * out.phi + 4.0 * std::sqrt(out.phi))));
  return out;
}

double weight_error_bound(const SkillVector& skills_true, const SkillVector& skills_est) {
  require(skills_true.size() == skills_est.size(), ErrorKind::kParameter, "dimension mismatch");
  double total = 0.0;
  for (int i = 0; i < skills_true.size(); ++i) {
    const double s = skills_true.values(i);
    const double e = skills_est.values(i);
    require(std::abs(s) < 1.0 && std::abs(e) < 1.0, ErrorKind::kParameter,
            "weight error bound undefined for skills at +-1");
    const double delta = std::max(std::abs((1.0 + e) / (1.0 + s) - 1.0),
                                  std::abs((1.0 - e) / (1.0 - s) - 1.0));
    total += 2.0 * delta;
  }
  return total;
}

PredictionError prediction_error(const std::vector<int>& predicted, const std::vector<int>& truth) {
  require(predicted.size() == truth.size(), ErrorKind::kParameter,
          "prediction and truth lengths differ");
  PredictionError out;
  for (std::size_t t = 0; t < predicted.size(); ++t) {
    if (predicted[t] == kAbstainClass) {
      ++out.abstained;
      continue;
    }
    ++out.scored;
    if (predicted[t] != truth[t]) ++out.errors;
  }
  out.rate = out.scored > 0 ? static_cast<double>(out.errors) / out.scored : 0.0;
  return out;
}

std::vector<int> binary_to_classes(const std::vector<int>& signs) {
  std::vector<int> out(signs.size(), kAbstainClass);
  for (std::size_t t = 0; t < signs.size(); ++t)
    if (signs[t] != kAbstainBinary) out[t] = class_of_sign(signs[t]);
  return out;
}

}  // namespace crowdrank
