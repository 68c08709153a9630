#include "crowdrank/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "crowdrank/error.hpp"

namespace crowdrank {

CorrelationEstimate CorrelationEstimate::from_entries(int worker_count, int class_count,
                                                      std::vector<CorrelationEntry> entries) {
  require(worker_count >= 1, ErrorKind::kParameter, "correlations need at least one worker");
  require(class_count >= 2, ErrorKind::kParameter, "class count must be at least 2");
  for (auto& e : entries) {
    if (e.i > e.j) std::swap(e.i, e.j);
    require(e.i >= 0 && e.j < worker_count && e.i != e.j, ErrorKind::kParameter,
            "correlation entry index out of range");
    require(e.n > 0, ErrorKind::kParameter, "correlation entry needs a positive count");
    require(std::isfinite(e.c), ErrorKind::kNumerical, "non-finite correlation value");
  }
  std::sort(entries.begin(), entries.end(), [](const CorrelationEntry& a, const CorrelationEntry& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  for (std::size_t k = 1; k < entries.size(); ++k)
    require(entries[k].i != entries[k - 1].i || entries[k].j != entries[k - 1].j,
            ErrorKind::kParameter, "duplicate correlation entry");

  CorrelationEstimate out;
  out.worker_count_ = worker_count;
  out.class_count_ = class_count;
  out.entries_ = std::move(entries);
  return out;
}

const CorrelationEntry* CorrelationEstimate::find(int i, int j) const {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), std::make_pair(i, j),
                             [](const CorrelationEntry& e, const std::pair<int, int>& key) {
                               return e.i != key.first ? e.i < key.first : e.j < key.second;
                             });
  if (it == entries_.end() || it->i != i || it->j != j) return nullptr;
  return &*it;
}

std::optional<double> CorrelationEstimate::value(int i, int j) const {
  if (const auto* e = find(i, j)) return e->c;
  return std::nullopt;
}

InteractionGraph CorrelationEstimate::graph() const {
  std::vector<Edge> edges;
  edges.reserve(entries_.size());
  for (const auto& e : entries_) edges.push_back({e.i, e.j, e.n});
  return InteractionGraph::from_edges(worker_count_, std::move(edges));
}

namespace {

struct PairSums {
  std::int64_t agreement = 0;  // sum of Y_i Y_j (binary) or matches (multiclass)
  std::int64_t n = 0;
};

// Walks tasks in index order and workers in index order within each task, so
// every pair's sum is accumulated in a fixed order.
template <typename Score>
std::vector<std::pair<std::pair<int, int>, PairSums>> accumulate_pairs(
    const ObservationSet& observations, Score score) {
  const auto w = static_cast<std::uint64_t>(observations.worker_count());
  std::unordered_map<std::uint64_t, PairSums> sums;
  for (int t = 0; t < observations.task_count(); ++t) {
    const auto labels = observations.task_labels(t);
    for (std::size_t a = 0; a < labels.size(); ++a) {
      for (std::size_t b = a + 1; b < labels.size(); ++b) {
        auto& s = sums[static_cast<std::uint64_t>(labels[a].worker) * w +
                       static_cast<std::uint64_t>(labels[b].worker)];
        s.agreement += score(labels[a].label, labels[b].label);
        ++s.n;
      }
    }
  }
  std::vector<std::pair<std::pair<int, int>, PairSums>> out;
  out.reserve(sums.size());
  for (const auto& [key, s] : sums)
    out.push_back({{static_cast<int>(key / w), static_cast<int>(key % w)}, s});
  return out;
}

}  // namespace

CorrelationEstimate estimate_correlations_binary(const ObservationSet& observations) {
  require(observations.class_count() == 2, ErrorKind::kParameter,
          "binary correlation estimator needs exactly two classes");
  std::vector<CorrelationEntry> entries;
  for (const auto& [pair, s] : accumulate_pairs(observations, [](int a, int b) {
         return label_sign(a) * label_sign(b);
       })) {
    entries.push_back({pair.first, pair.second,
                       static_cast<double>(s.agreement) / static_cast<double>(s.n), s.n});
  }
  return CorrelationEstimate::from_entries(observations.worker_count(), 2, std::move(entries));
}

CorrelationEstimate estimate_correlations_multiclass(const ObservationSet& observations) {
  const int m = observations.class_count();
  const double scale = static_cast<double>(m) / static_cast<double>(m - 1);
  const double offset = 1.0 / static_cast<double>(m - 1);
  std::vector<CorrelationEntry> entries;
  for (const auto& [pair, s] :
       accumulate_pairs(observations, [](int a, int b) { return a == b ? 1 : 0; })) {
    const double match_rate = static_cast<double>(s.agreement) / static_cast<double>(s.n);
    entries.push_back({pair.first, pair.second, scale * match_rate - offset, s.n});
  }
  return CorrelationEstimate::from_entries(observations.worker_count(), m, std::move(entries));
}

CorrelationEstimate estimate_correlations(const ObservationSet& observations) {
  return observations.class_count() == 2 ? estimate_correlations_binary(observations)
                                         : estimate_correlations_multiclass(observations);
}

std::pair<CorrelationEstimate, InteractionGraph> threshold_spammers(
    const CorrelationEstimate& corr, double delta, const InteractionGraph& graph) {
  require(delta >= 0.0, ErrorKind::kParameter, "spammer threshold delta must be >= 0");
  require(corr.worker_count() == graph.worker_count(), ErrorKind::kParameter,
          "correlation and graph sizes differ");
  const double log_w = std::log(static_cast<double>(corr.worker_count()));
  auto kept = corr.filter([&](const CorrelationEntry& e) {
    return std::abs(e.c) >= delta + std::sqrt(log_w / static_cast<double>(e.n));
  });
  auto pruned = graph.filter_edges([&](const Edge& e) { return kept.find(e.i, e.j) != nullptr; });
  return {std::move(kept), std::move(pruned)};
}

std::pair<CorrelationEstimate, InteractionGraph> drop_sparse_edges(
    const CorrelationEstimate& corr, std::int64_t min_count, const InteractionGraph& graph) {
  auto kept = corr.filter([&](const CorrelationEntry& e) { return e.n >= min_count; });
  auto pruned = graph.filter_edges([&](const Edge& e) { return e.n >= min_count; });
  return {std::move(kept), std::move(pruned)};
}

double hoeffding_radius(std::int64_t n_min, double degree_sum, double delta) {
  require(n_min > 0, ErrorKind::kParameter, "N_min must be positive");
  require(degree_sum > 0.0, ErrorKind::kParameter, "degree sum must be positive");
  require(delta > 0.0 && delta <= 1.0, ErrorKind::kParameter,
          "confidence parameter delta must lie in (0, 1], got " + std::to_string(delta));
  return std::log(degree_sum / delta) / std::sqrt(static_cast<double>(n_min));
}

}  // namespace crowdrank
