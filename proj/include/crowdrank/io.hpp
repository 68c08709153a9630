#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "crowdrank/observation_set.hpp"

namespace crowdrank {

/// How binary labels are written in CSV files. Multiclass data always uses
/// class indices 0..M-1.
enum class LabelEncoding {
  kPlusMinusOne,  // +1 / -1
  kZeroOne,       // 1 = positive, 0 = negative
  kClassIndex,    // 0..M-1
};

const char* to_string(LabelEncoding encoding) noexcept;
LabelEncoding parse_label_encoding(const std::string& name);

/// Label text -> class index; nullopt if the text is not a valid label.
std::optional<int> decode_label(const std::string& text, LabelEncoding encoding);
/// Class index -> label text.
std::string encode_label(int cls, LabelEncoding encoding);

/// String ids interned to dense indices in order of first appearance.
class IdMap {
 public:
  int intern(const std::string& id);
  std::optional<int> find(const std::string& id) const;
  const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
  int size() const noexcept { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> names_;
};

struct LabeledData {
  ObservationSet observations;
  IdMap workers;
  IdMap tasks;
  LabelEncoding encoding = LabelEncoding::kPlusMinusOne;
};

/// Reads `worker_id,task_id,label`. For kClassIndex the class count is
/// `class_count` when positive, else max label + 1 (at least 2). Errors
/// carry the source name and line number.
LabeledData read_observations(std::istream& in, LabelEncoding encoding, int class_count = 0,
                              const std::string& source = "<input>");
LabeledData read_observations_file(const std::string& path, LabelEncoding encoding,
                                   int class_count = 0);

void write_observations(std::ostream& out, const ObservationSet& observations, const IdMap& workers,
                        const IdMap& tasks, LabelEncoding encoding);

/// Rows of a two-column `task_id,label` file, labels decoded to classes.
std::vector<std::pair<std::string, int>> read_truth(std::istream& in, LabelEncoding encoding,
                                                    const std::string& source = "<input>");
std::vector<std::pair<std::string, int>> read_truth_file(const std::string& path,
                                                         LabelEncoding encoding);
void write_truth(std::ostream& out, const std::vector<int>& labels, const IdMap& tasks,
                 LabelEncoding encoding);

/// Splits one CSV line on commas, trimming blanks and surrounding quotes.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace crowdrank
