#include "hretan/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "hretan/errors.hpp"
#include "hretan/rng.hpp"

namespace hretan {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool is_blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); });
}

}  // namespace

Dataset::Dataset(std::vector<std::string> feature_names, std::string class_column,
                 std::vector<std::string> class_names, std::vector<std::uint8_t> values,
                 std::vector<std::size_t> labels)
    : feature_names_(std::move(feature_names)),
      class_column_(std::move(class_column)),
      class_names_(std::move(class_names)),
      values_(std::move(values)),
      labels_(std::move(labels)) {
  if (feature_names_.empty()) throw ArgumentError("dataset needs at least one feature");
  if (class_names_.empty()) throw ArgumentError("dataset needs at least one class");
  if (values_.size() != labels_.size() * feature_names_.size())
    throw ArgumentError("value matrix size does not match rows x features");
  for (auto v : values_)
    if (v > 1) throw ArgumentError("feature values must be 0 or 1");
  for (auto l : labels_)
    if (l >= class_names_.size()) throw ArgumentError("label out of range");
}

Instance Dataset::instance(std::size_t r) const {
  auto span = row(r);
  return Instance{{span.begin(), span.end()}};
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<std::uint8_t> values;
  values.reserve(rows.size() * n_features());
  std::vector<std::size_t> labels;
  labels.reserve(rows.size());
  for (auto r : rows) {
    if (r >= n_instances()) throw IndexError("row index out of range");
    auto span = row(r);
    values.insert(values.end(), span.begin(), span.end());
    labels.push_back(labels_[r]);
  }
  return Dataset(feature_names_, class_column_, class_names_, std::move(values),
                 std::move(labels));
}

Dataset parse_dataset(std::istream& in, const std::optional<std::string>& positive_class) {
  std::string line;
  std::size_t line_no = 0;

  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw ParseError(line_no, "empty header");
  if (header.size() < 2) throw ParseError(line_no, "header needs feature columns and a class column");
  {
    std::unordered_set<std::string> seen;
    for (const auto& name : header) {
      if (name.empty()) throw ParseError(line_no, "empty column name");
      if (!seen.insert(name).second) throw ParseError(line_no, "duplicate column '" + name + "'");
    }
  }
  const std::size_t n_features = header.size() - 1;

  std::vector<std::uint8_t> values;
  std::vector<std::string> raw_labels;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    for (std::size_t f = 0; f < n_features; ++f) {
      if (fields[f] == "0") {
        values.push_back(0);
      } else if (fields[f] == "1") {
        values.push_back(1);
      } else if (fields[f].empty()) {
        throw ParseError(line_no, "missing value in column '" + header[f] + "'");
      } else {
        throw ParseError(line_no, "non-binary value '" + fields[f] + "' in column '" + header[f] + "'");
      }
    }
    if (fields.back().empty()) throw ParseError(line_no, "missing class label");
    raw_labels.push_back(fields.back());
  }
  if (raw_labels.empty()) throw ParseError(line_no, "no instances");

  std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  std::vector<std::string> class_names(distinct.begin(), distinct.end());
  if (positive_class) {
    auto it = std::find(class_names.begin(), class_names.end(), *positive_class);
    if (it == class_names.end())
      throw ParseError(line_no, "positive class '" + *positive_class + "' not present");
    if (class_names.size() != 2)
      throw ParseError(line_no, "positive class override needs exactly two classes");
    if (it == class_names.begin()) std::swap(class_names[0], class_names[1]);
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < class_names.size(); ++c) index[class_names[c]] = c;
  std::vector<std::size_t> labels;
  labels.reserve(raw_labels.size());
  for (const auto& l : raw_labels) labels.push_back(index.at(l));

  std::vector<std::string> feature_names(header.begin(), header.end() - 1);
  return Dataset(std::move(feature_names), header.back(), std::move(class_names),
                 std::move(values), std::move(labels));
}

Dataset parse_dataset_string(const std::string& text,
                             const std::optional<std::string>& positive_class) {
  std::istringstream in(text);
  return parse_dataset(in, positive_class);
}

Dataset load_dataset(const std::string& path, const std::optional<std::string>& positive_class) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file '" + path + "'");
  return parse_dataset(in, positive_class);
}

std::string serialize_dataset(const Dataset& data) {
  std::string out;
  for (const auto& name : data.feature_names()) {
    out += name;
    out += ',';
  }
  out += data.class_column();
  out += '\n';
  for (std::size_t r = 0; r < data.n_instances(); ++r) {
    for (auto v : data.row(r)) {
      out += v ? '1' : '0';
      out += ',';
    }
    out += data.class_names()[data.label(r)];
    out += '\n';
  }
  return out;
}

std::vector<std::size_t> FoldSplit::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of.size(); ++r)
    if (fold_of[r] == fold) rows.push_back(r);
  return rows;
}

std::vector<std::size_t> FoldSplit::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of.size(); ++r)
    if (fold_of[r] != fold) rows.push_back(r);
  return rows;
}

FoldSplit stratified_kfold(const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("k must be at least 2");
  if (k > data.n_instances()) throw ArgumentError("k exceeds the number of instances");

  std::vector<std::vector<std::size_t>> by_class(data.n_classes());
  for (std::size_t r = 0; r < data.n_instances(); ++r) by_class[data.label(r)].push_back(r);

  SplitMix64 rng(seed);
  FoldSplit split{k, std::vector<std::size_t>(data.n_instances())};
  std::size_t position = 0;
  for (auto& rows : by_class) {
    for (std::size_t i = rows.size(); i > 1; --i) {
      const auto j = rng.uniform_index(i);
      std::swap(rows[i - 1], rows[j]);
    }
    for (auto r : rows) split.fold_of[r] = position++ % k;
  }
  return split;
}

namespace {

void check_selection(std::span<const std::size_t> kept, std::size_t n_features) {
  if (kept.empty()) throw IndexError("projection keeps no features");
  std::vector<bool> seen(n_features, false);
  for (auto f : kept) {
    if (f >= n_features) throw IndexError("feature index " + std::to_string(f) + " out of range");
    if (seen[f]) throw IndexError("feature index " + std::to_string(f) + " repeated");
    seen[f] = true;
  }
}

}  // namespace

Dataset project(const Dataset& data, std::span<const std::size_t> kept) {
  check_selection(kept, data.n_features());
  std::vector<std::string> names;
  names.reserve(kept.size());
  for (auto f : kept) names.push_back(data.feature_names()[f]);
  std::vector<std::uint8_t> values;
  values.reserve(kept.size() * data.n_instances());
  for (std::size_t r = 0; r < data.n_instances(); ++r) {
    auto row = data.row(r);
    for (auto f : kept) values.push_back(row[f]);
  }
  return Dataset(std::move(names), data.class_column(), data.class_names(), std::move(values),
                 data.labels());
}

Instance project_instance(const Instance& inst, std::span<const std::size_t> kept) {
  check_selection(kept, inst.size());
  Instance out;
  out.values.reserve(kept.size());
  for (auto f : kept) out.values.push_back(inst.values[f]);
  return out;
}

}  // namespace hretan
