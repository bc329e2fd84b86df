#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hretan/dataset.hpp"

namespace hretan {

/// P(c) = (count(c) + smoothing) / (N + smoothing * |C|).
std::vector<double> class_prior(const Dataset& train, double smoothing);

/// I(X_i; X_j | C) in nats from unsmoothed relative frequencies. Zero-count
/// cells contribute nothing; tiny negative round-off is clamped to 0.
/// Exactly symmetric in (i, j). Throws IndexError.
double conditional_mutual_information(const Dataset& train, std::size_t i, std::size_t j);

struct ScoredEdge {
  std::size_t i;  // i < j
  std::size_t j;
  double cmi;

  bool operator==(const ScoredEdge&) const = default;
};

enum class EdgeStatus : std::uint8_t { Available, Unavailable };

/// Every unordered feature pair exactly once, sorted by descending weight
/// with ties broken by ascending (i, j). Immutable; per-node incidence lists
/// (positions into edges()) are precomputed.
class ScoredEdgeList {
 public:
  /// Validates coverage and sorts. Pairs may be given in either orientation.
  /// Throws ArgumentError if a pair is missing, repeated or a weight is
  /// negative or NaN.
  ScoredEdgeList(std::size_t n_features, std::vector<ScoredEdge> edges);

  std::size_t n_features() const { return n_features_; }
  std::size_t size() const { return edges_.size(); }
  const std::vector<ScoredEdge>& edges() const { return edges_; }
  const ScoredEdge& operator[](std::size_t k) const { return edges_[k]; }
  const std::vector<EdgeStatus>& status() const { return status_; }
  const std::vector<std::size_t>& incident(std::size_t node) const { return incident_[node]; }

 private:
  std::size_t n_features_;
  std::vector<ScoredEdge> edges_;
  std::vector<EdgeStatus> status_;
  std::vector<std::vector<std::size_t>> incident_;
};

/// Scores all n(n-1)/2 pairs by CMI; every status Available. Scoring runs in
/// parallel, the final sort fixes the order. A single feature gives an
/// empty list.
ScoredEdgeList score_all_edges(const Dataset& train);

struct DirectedTree;

/// Conditional probability table of one tree node:
/// P(x = v | parent = u, c), or P(x = v | c) for the root.
struct CptNode {
  std::size_t feature;
  std::optional<std::size_t> parent;
  std::vector<double> table;

  double prob(std::size_t c, std::uint8_t u, std::uint8_t v) const {
    return parent ? table[(c * 2 + u) * 2 + v] : table[c * 2 + v];
  }
};

struct Cpt {
  std::vector<double> class_prior;
  std::vector<CptNode> nodes;  // ascending by feature
};

/// Laplace-smoothed CPTs for the tree's features. A conditioning cell with
/// no data and zero smoothing gets a uniform distribution. Throws
/// StructureError if the tree references a feature outside `train`.
Cpt estimate_cpts(const Dataset& train, const DirectedTree& tree, double smoothing);

}  // namespace hretan
