#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hretan {

/// One row of binary feature values, index-aligned with the dataset columns.
struct Instance {
  std::vector<std::uint8_t> values;

  std::size_t size() const { return values.size(); }
  std::uint8_t operator[](std::size_t i) const { return values[i]; }

  bool operator==(const Instance&) const = default;
};

/// Binary feature matrix with class labels. Immutable after construction.
///
/// Class index 0 is the negative class and 1 the positive class for two-class
/// data; more classes are allowed for estimation and classification but not
/// for the binary evaluation metrics.
class Dataset {
 public:
  /// `values` is row-major, n_instances x feature_names.size().
  /// Throws ArgumentError when any invariant is violated.
  Dataset(std::vector<std::string> feature_names, std::string class_column,
          std::vector<std::string> class_names, std::vector<std::uint8_t> values,
          std::vector<std::size_t> labels);

  std::size_t n_instances() const { return labels_.size(); }
  std::size_t n_features() const { return feature_names_.size(); }
  std::size_t n_classes() const { return class_names_.size(); }

  std::uint8_t value(std::size_t row, std::size_t feature) const {
    return values_[row * n_features() + feature];
  }
  std::span<const std::uint8_t> row(std::size_t r) const {
    return {values_.data() + r * n_features(), n_features()};
  }
  Instance instance(std::size_t r) const;
  std::size_t label(std::size_t r) const { return labels_[r]; }

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::string& class_column() const { return class_column_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<std::size_t>& labels() const { return labels_; }
  const std::vector<std::uint8_t>& values() const { return values_; }

  /// Rows in the given order (duplicates allowed). Throws IndexError.
  Dataset subset(std::span<const std::size_t> rows) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> feature_names_;
  std::string class_column_;
  std::vector<std::string> class_names_;
  std::vector<std::uint8_t> values_;
  std::vector<std::size_t> labels_;
};

/// Parses the CSV dataset format: a header line of feature names followed by
/// the class column name, then one row per instance with `0`/`1` feature
/// values and a class label string. Class names are ordered
/// lexicographically; when `positive_class` is given and the file has two
/// classes, that class is placed at index 1. Throws ParseError.
Dataset parse_dataset(std::istream& in,
                      const std::optional<std::string>& positive_class = std::nullopt);
Dataset parse_dataset_string(const std::string& text,
                             const std::optional<std::string>& positive_class = std::nullopt);
Dataset load_dataset(const std::string& path,
                     const std::optional<std::string>& positive_class = std::nullopt);

/// Writes the CSV format with LF line endings.
std::string serialize_dataset(const Dataset& data);

/// Fold id in [0, k) for every row.
struct FoldSplit {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of;

  std::vector<std::size_t> test_rows(std::size_t fold) const;
  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

/// Stratified k-fold assignment.
///
/// Rows of each class (in class-index order) are shuffled with a seeded
/// Fisher-Yates pass driven by SplitMix64, then dealt round-robin to the
/// folds. The dealing position carries over from one class to the next, so
/// per-class counts differ by at most one across folds and so do fold sizes.
/// Throws ArgumentError if k < 2 or k > n_instances.
FoldSplit stratified_kfold(const Dataset& data, std::size_t k, std::uint64_t seed);

/// Restricts columns to `kept` in the given order. Throws IndexError for an
/// invalid, duplicate or empty selection.
Dataset project(const Dataset& data, std::span<const std::size_t> kept);
Instance project_instance(const Instance& inst, std::span<const std::size_t> kept);

}  // namespace hretan
