#include "crowdrank/observation_set.hpp"

#include <algorithm>
#include <string>

#include "crowdrank/error.hpp"

namespace crowdrank {

ObservationSet ObservationSet::create(int worker_count, int task_count, int class_count,
                                      std::vector<Observation> triples) {
  require(worker_count >= 1, ErrorKind::kParameter, "observation set needs at least one worker");
  require(task_count >= 0, ErrorKind::kParameter, "negative task count");
  require(class_count >= 2, ErrorKind::kParameter, "class count must be at least 2");

  for (const auto& o : triples) {
    if (o.worker < 0 || o.worker >= worker_count || o.task < 0 || o.task >= task_count) {
      fail(ErrorKind::kData, "observation index out of range (worker " + std::to_string(o.worker) +
                                 ", task " + std::to_string(o.task) + ")");
    }
    if (o.label < 0 || o.label >= class_count) {
      fail(ErrorKind::kData, "label " + std::to_string(o.label) + " outside [0, " +
                                 std::to_string(class_count) + ")");
    }
  }

  std::sort(triples.begin(), triples.end(), [](const Observation& a, const Observation& b) {
    return a.task != b.task ? a.task < b.task : a.worker < b.worker;
  });

  std::vector<Observation> unique;
  unique.reserve(triples.size());
  for (const auto& o : triples) {
    if (!unique.empty() && unique.back().task == o.task && unique.back().worker == o.worker) {
      if (unique.back().label != o.label) {
        fail(ErrorKind::kData, "conflicting duplicate labels for worker " +
                                   std::to_string(o.worker) + " on task " + std::to_string(o.task));
      }
      continue;
    }
    unique.push_back(o);
  }

  ObservationSet set;
  set.worker_count_ = worker_count;
  set.task_count_ = task_count;
  set.class_count_ = class_count;
  set.triples_ = std::move(unique);
  set.task_offsets_.assign(static_cast<std::size_t>(task_count) + 1, 0);
  for (const auto& o : set.triples_) ++set.task_offsets_[static_cast<std::size_t>(o.task) + 1];
  for (std::size_t t = 1; t < set.task_offsets_.size(); ++t)
    set.task_offsets_[t] += set.task_offsets_[t - 1];
  return set;
}

std::span<const Observation> ObservationSet::task_labels(int task) const {
  require(task >= 0 && task < task_count_, ErrorKind::kParameter, "task index out of range");
  const auto begin = task_offsets_[static_cast<std::size_t>(task)];
  const auto end = task_offsets_[static_cast<std::size_t>(task) + 1];
  return std::span<const Observation>(triples_).subspan(begin, end - begin);
}

std::vector<int> ObservationSet::tasks_per_worker() const {
  std::vector<int> counts(static_cast<std::size_t>(worker_count_), 0);
  for (const auto& o : triples_) ++counts[static_cast<std::size_t>(o.worker)];
  return counts;
}

}  // namespace crowdrank
