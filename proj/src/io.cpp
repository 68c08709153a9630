#include "crowdrank/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "crowdrank/error.hpp"

namespace crowdrank {

const char* to_string(LabelEncoding encoding) noexcept {
  switch (encoding) {
    case LabelEncoding::kPlusMinusOne: return "pm1";
    case LabelEncoding::kZeroOne: return "01";
    case LabelEncoding::kClassIndex: return "class";
  }
  return "unknown";
}

LabelEncoding parse_label_encoding(const std::string& name) {
  for (auto e : {LabelEncoding::kPlusMinusOne, LabelEncoding::kZeroOne, LabelEncoding::kClassIndex})
    if (name == to_string(e)) return e;
  fail(ErrorKind::kParameter, "unknown label encoding '" + name + "' (pm1, 01 or class)");
}

namespace {

std::optional<int> parse_int(const std::string& text) {
  std::string_view sv = text;
  if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
  if (ec != std::errc() || ptr != sv.data() + sv.size() || sv.empty()) return std::nullopt;
  return value;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_error(const std::string& source, int line, const std::string& msg) {
  fail(ErrorKind::kData, source + ":" + std::to_string(line) + ": " + msg);
}

// Reads the header and returns false on an empty stream.
bool read_header(std::istream& in, const std::string& source, const std::vector<std::string>& expected,
                 int& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);
    if (!fields.empty() && fields[0].rfind("\xEF\xBB\xBF", 0) == 0) fields[0] = fields[0].substr(3);
    if (fields != expected) {
      std::string want;
      for (const auto& f : expected) want += (want.empty() ? "" : ",") + f;
      parse_error(source, line_no, "expected header '" + want + "'");
    }
    return true;
  }
  return false;
}

}  // namespace

std::optional<int> decode_label(const std::string& text, LabelEncoding encoding) {
  const auto v = parse_int(text);
  if (!v) return std::nullopt;
  switch (encoding) {
    case LabelEncoding::kPlusMinusOne:
      if (*v == 1) return kPositiveClass;
      if (*v == -1) return kNegativeClass;
      return std::nullopt;
    case LabelEncoding::kZeroOne:
      if (*v == 1) return kPositiveClass;
      if (*v == 0) return kNegativeClass;
      return std::nullopt;
    case LabelEncoding::kClassIndex:
      if (*v >= 0) return *v;
      return std::nullopt;
  }
  return std::nullopt;
}

std::string encode_label(int cls, LabelEncoding encoding) {
  switch (encoding) {
    case LabelEncoding::kPlusMinusOne: return cls == kPositiveClass ? "1" : "-1";
    case LabelEncoding::kZeroOne: return cls == kPositiveClass ? "1" : "0";
    case LabelEncoding::kClassIndex: return std::to_string(cls);
  }
  return {};
}

int IdMap::intern(const std::string& id) {
  const auto [it, inserted] = index_.emplace(id, static_cast<int>(names_.size()));
  if (inserted) names_.push_back(id);
  return it->second;
}

std::optional<int> IdMap::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    std::string field = trim(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') field = field.substr(1, field.size() - 2);
    fields.push_back(std::move(field));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

LabeledData read_observations(std::istream& in, LabelEncoding encoding, int class_count,
                              const std::string& source) {
  LabeledData out;
  out.encoding = encoding;
  int line_no = 0;
  if (!read_header(in, source, {"worker_id", "task_id", "label"}, line_no))
    fail(ErrorKind::kData, source + ": empty file");

  std::vector<Observation> triples;
  int max_label = 1;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3)
      parse_error(source, line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    if (fields[0].empty() || fields[1].empty()) parse_error(source, line_no, "empty id");
    const auto cls = decode_label(fields[2], encoding);
    if (!cls)
      parse_error(source, line_no, "bad label '" + fields[2] + "' for encoding " + to_string(encoding));
    if (class_count > 0 && *cls >= class_count)
      parse_error(source, line_no, "label " + fields[2] + " outside 0.." + std::to_string(class_count - 1));
    max_label = std::max(max_label, *cls);
    triples.push_back({out.workers.intern(fields[0]), out.tasks.intern(fields[1]), *cls});
  }
  if (triples.empty()) fail(ErrorKind::kData, source + ": no observations");

  int m = 2;
  if (encoding == LabelEncoding::kClassIndex) m = class_count > 0 ? class_count : max_label + 1;
  else if (class_count > 0 && class_count != 2)
    fail(ErrorKind::kParameter, "binary label encoding with class count " + std::to_string(class_count));
  out.observations = ObservationSet::create(out.workers.size(), out.tasks.size(), m, std::move(triples));
  return out;
}

LabeledData read_observations_file(const std::string& path, LabelEncoding encoding, int class_count) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kData, "cannot open '" + path + "'");
  return read_observations(in, encoding, class_count, path);
}

void write_observations(std::ostream& out, const ObservationSet& observations, const IdMap& workers,
                        const IdMap& tasks, LabelEncoding encoding) {
  out << "worker_id,task_id,label\n";
  for (const auto& o : observations.triples())
    out << workers.name(o.worker) << ',' << tasks.name(o.task) << ',' << encode_label(o.label, encoding) << '\n';
}

std::vector<std::pair<std::string, int>> read_truth(std::istream& in, LabelEncoding encoding,
                                                    const std::string& source) {
  int line_no = 0;
  if (!read_header(in, source, {"task_id", "label"}, line_no)) fail(ErrorKind::kData, source + ": empty file");
  std::vector<std::pair<std::string, int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      parse_error(source, line_no, "expected 2 fields, found " + std::to_string(fields.size()));
    const auto cls = decode_label(fields[1], encoding);
    if (!cls) parse_error(source, line_no, "bad label '" + fields[1] + "'");
    rows.emplace_back(fields[0], *cls);
  }
  return rows;
}

std::vector<std::pair<std::string, int>> read_truth_file(const std::string& path, LabelEncoding encoding) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kData, "cannot open '" + path + "'");
  return read_truth(in, encoding, path);
}

void write_truth(std::ostream& out, const std::vector<int>& labels, const IdMap& tasks,
                 LabelEncoding encoding) {
  out << "task_id,label\n";
  for (std::size_t t = 0; t < labels.size(); ++t)
    out << tasks.name(static_cast<int>(t)) << ',' << encode_label(labels[t], encoding) << '\n';
}

}  // namespace crowdrank
