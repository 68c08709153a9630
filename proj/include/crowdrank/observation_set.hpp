#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace crowdrank {

/// One label: worker `worker` assigned class `label` to task `task`.
/// All three are dense zero-based indices.
struct Observation {
  int worker = 0;
  int task = 0;
  int label = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Binary data is stored as class indices like any other data: class 0 is the
// +1 label and class 1 is the -1 label. With this layout the multiclass rules
// (lowest class index wins ties) and the binary rules (ties go to +1) agree.
inline constexpr int kPositiveClass = 0;
inline constexpr int kNegativeClass = 1;

constexpr int label_sign(int cls) noexcept { return cls == kPositiveClass ? 1 : -1; }
constexpr int class_of_sign(int sign) noexcept {
  return sign > 0 ? kPositiveClass : kNegativeClass;
}

/// Immutable sparse worker x task label matrix.
///
/// Triples are kept sorted by (task, worker) so every per-task pass visits
/// observations in a fixed order. Identical duplicate triples are collapsed;
/// a duplicate (worker, task) pair with a different label is a data error.
class ObservationSet {
 public:
  ObservationSet() = default;

  static ObservationSet create(int worker_count, int task_count, int class_count,
                               std::vector<Observation> triples);

  int worker_count() const noexcept { return worker_count_; }
  int task_count() const noexcept { return task_count_; }
  int class_count() const noexcept { return class_count_; }
  bool empty() const noexcept { return triples_.empty(); }
  std::size_t size() const noexcept { return triples_.size(); }

  std::span<const Observation> triples() const noexcept { return triples_; }

  /// Labels given to task `task`, ordered by worker.
  std::span<const Observation> task_labels(int task) const;

  /// Number of tasks each worker labeled.
  std::vector<int> tasks_per_worker() const;

 private:
  int worker_count_ = 0;
  int task_count_ = 0;
  int class_count_ = 2;
  std::vector<Observation> triples_;
  std::vector<std::size_t> task_offsets_;  // CSR offsets, size task_count + 1
};

}  // namespace crowdrank
