#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hretan/dataset.hpp"
#include "hretan/estimation.hpp"

namespace hretan {

struct UndirectedTree {
  std::vector<std::size_t> vertices;                        // ascending
  std::vector<std::pair<std::size_t, std::size_t>> edges;   // (i < j), insertion order

  double total_weight(const ScoredEdgeList& scored) const;
};

/// Rooted feature tree.
struct DirectedTree {
  std::vector<std::size_t> features;             // ascending
  std::size_t root = 0;
  std::map<std::size_t, std::size_t> parent_of;  // child -> parent

  bool operator==(const DirectedTree&) const = default;
};

enum class RootPolicy { Random, First };

struct RootChoice {
  RootPolicy policy = RootPolicy::Random;
  std::uint64_t seed = 0;
};

/// Random: uniform draw over `vertices` from SplitMix64(seed).
/// First: the lowest vertex index.
std::size_t choose_root(const std::vector<std::size_t>& vertices, const RootChoice& choice);

/// Kruskal over the descending-sorted list with union-find cycle rejection.
UndirectedTree build_mst(const ScoredEdgeList& edges, std::size_t n_features);

/// Breadth-first orientation away from `root`. Throws StructureError if the
/// root is not a vertex or the edges do not form a spanning tree.
DirectedTree direct_tree(const UndirectedTree& tree, std::size_t root);

struct PredictionResult {
  std::size_t label = 0;
  std::vector<double> posterior;
};

struct TanModel {
  std::size_t n_features = 0;
  DirectedTree tree;
  Cpt cpt;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
};

/// score_all_edges -> build_mst -> choose_root -> direct_tree -> estimate_cpts.
TanModel fit_tan(const Dataset& train, const RootChoice& root, double smoothing);

/// Assembles a model for an existing tree.
TanModel make_model(const Dataset& train, DirectedTree tree, double smoothing);

/// posterior(c) proportional to P(c) P(x_root | c) prod P(x | parent(x), c),
/// accumulated in log space. Argmax ties go to the lowest class index.
/// Throws DimensionError.
PredictionResult classify(const TanModel& model, const Instance& inst);

/// Normalizes log scores into a PredictionResult.
PredictionResult posterior_from_log_scores(const std::vector<double>& log_scores);

/// Debugging dump: {"root", "edges": [[parent, child], ...], "cpt": ...}.
std::string model_to_json(const TanModel& model);

}  // namespace hretan
