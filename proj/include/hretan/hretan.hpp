#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hretan/dataset.hpp"
#include "hretan/estimation.hpp"
#include "hretan/hierarchy.hpp"
#include "hretan/tan.hpp"

namespace hretan {

/// Per-instance edge status, copied from the master list so the master is
/// never mutated.
class EdgeStatusScratch {
 public:
  explicit EdgeStatusScratch(const ScoredEdgeList& master)
      : status_(master.status()), node_cleared_(master.n_features(), false) {}

  bool available(std::size_t edge) const { return status_[edge] == EdgeStatus::Available; }

  // Marks every edge touching `node` unavailable.
  void invalidate_node(const ScoredEdgeList& master, std::size_t node);

 private:
  std::vector<EdgeStatus> status_;
  std::vector<bool> node_cleared_;
};

/// Undirected part of the redundancy-eliminated spanning tree: edges are
/// scanned in descending CMI order and added when available, not
/// hierarchically redundant and acyclic. After each addition every relative
/// of either endpoint sharing its value in `inst` loses all its edges.
/// Throws EmptyTreeSignal when nothing is added, DimensionError on size
/// mismatch.
UndirectedTree hre_mst_edges(const FeatureDag& dag, const ScoredEdgeList& edges,
                             const Instance& inst);

/// hre_mst_edges followed by a root draw over the included features and
/// outward orientation.
DirectedTree hre_mst(const FeatureDag& dag, const ScoredEdgeList& edges, const Instance& inst,
                     const RootChoice& root);

struct LazyPrediction {
  PredictionResult result;
  std::optional<DirectedTree> tree;  // empty on the class-prior fallback
};

/// Classifies one instance with a TAN restricted to the features of its own
/// redundancy-eliminated tree. `edges` are scored once on `train`.
LazyPrediction classify_lazy(const Dataset& train, const FeatureDag& dag,
                             const ScoredEdgeList& edges, const Instance& inst,
                             const RootChoice& root, double smoothing);

/// Runs classify_lazy over every test row in parallel. Each instance's root
/// is drawn from its own feature set with the base seed, so results do not
/// depend on row order.
std::vector<PredictionResult> evaluate_hre_tan(const Dataset& train, const Dataset& test,
                                               const FeatureDag& dag, const RootChoice& root,
                                               double smoothing);

/// Eager baseline: one TAN fitted on `train`, applied to every test row.
std::vector<PredictionResult> evaluate_tan(const Dataset& train, const Dataset& test,
                                           const RootChoice& root, double smoothing);

}  // namespace hretan
