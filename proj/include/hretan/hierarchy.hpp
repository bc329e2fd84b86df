#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "hretan/dataset.hpp"

namespace hretan {

/// Feature hierarchy. Edges point child -> parent (toward more generic
/// terms). Ancestor and descendant closures are materialized at build time
/// and the object is immutable afterwards.
class FeatureDag {
 public:
  std::size_t n_features() const { return names_.size(); }
  const std::vector<std::string>& feature_names() const { return names_; }

  /// Sorted index lists; closures exclude the feature itself.
  const std::vector<std::size_t>& parents(std::size_t i) const { return parents_[i]; }
  const std::vector<std::size_t>& ancestors(std::size_t i) const { return ancestors_[i]; }
  const std::vector<std::size_t>& descendants(std::size_t i) const { return descendants_[i]; }
  /// Union of ancestors and descendants, sorted.
  const std::vector<std::size_t>& relatives(std::size_t i) const { return relatives_[i]; }

  bool is_ancestor(std::size_t ancestor, std::size_t of) const;
  bool related(std::size_t i, std::size_t j) const;

  std::size_t edge_count() const;
  std::size_t index_of(const std::string& name) const;  // throws UnknownFeatureError

 private:
  friend FeatureDag build_dag(const std::vector<std::string>&,
                              const std::vector<std::pair<std::string, std::string>>&);

  std::vector<std::string> names_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> ancestors_;
  std::vector<std::vector<std::size_t>> descendants_;
  std::vector<std::vector<std::size_t>> relatives_;
  // n x n relation bitmap: 1 = ancestor-of, 2 = descendant-of.
  std::vector<std::uint8_t> relation_;
};

/// Builds the DAG from (child, parent) name pairs. Throws CycleError (naming
/// one cycle), UnknownFeatureError or DuplicateFeatureError.
FeatureDag build_dag(const std::vector<std::string>& feature_names,
                     const std::vector<std::pair<std::string, std::string>>& edges);

/// Reads `child<TAB>parent` lines; `#` starts a comment, blank lines are
/// skipped. Throws ParseError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_dag_edges(std::istream& in);
std::vector<std::pair<std::string, std::string>> load_dag_edges(const std::string& path);
std::string serialize_dag_edges(const FeatureDag& dag);

/// True iff i and j lie on a common path of the hierarchy and share the same
/// value in `inst`. Symmetric. Throws IndexError when i == j or out of range.
bool is_hierarchically_redundant(const FeatureDag& dag, std::size_t i, std::size_t j,
                                 const Instance& inst);

struct TruePathViolation {
  std::size_t row;
  std::size_t feature;
  std::size_t ancestor;

  bool operator==(const TruePathViolation&) const = default;
};

/// Every (row, i, a) where row[i] = 1, a is an ancestor of i and row[a] = 0.
/// Throws DimensionError on a column/feature count mismatch.
std::vector<TruePathViolation> validate_true_path(const FeatureDag& dag, const Dataset& data);

/// Copy of `data` with 1s propagated to all ancestors.
Dataset repair_true_path(const FeatureDag& dag, const Dataset& data);

}  // namespace hretan
