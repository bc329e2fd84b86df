#include "hretan/hretan.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "hretan/errors.hpp"
#include "hretan/parallel.hpp"
#include "hretan/union_find.hpp"

namespace hretan {

void EdgeStatusScratch::invalidate_node(const ScoredEdgeList& master, std::size_t node) {
  if (node_cleared_[node]) return;
  node_cleared_[node] = true;
  for (auto k : master.incident(node)) status_[k] = EdgeStatus::Unavailable;
}

UndirectedTree hre_mst_edges(const FeatureDag& dag, const ScoredEdgeList& edges,
                             const Instance& inst) {
  const auto n = dag.n_features();
  if (inst.size() != n || edges.n_features() != n)
    throw DimensionError("instance, hierarchy and edge list must agree on the feature count");

  EdgeStatusScratch scratch(edges);
  UnionFind uf(n);
  std::vector<bool> included(n, false);
  UndirectedTree tree;

  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (!scratch.available(k)) continue;
    if (dag.related(e.i, e.j) && inst[e.i] == inst[e.j]) continue;
    if (!uf.unite(e.i, e.j)) continue;

    tree.edges.emplace_back(e.i, e.j);
    for (auto g : {e.i, e.j}) {
      included[g] = true;
      for (auto h : dag.relatives(g))
        if (inst[g] == inst[h]) scratch.invalidate_node(edges, h);
    }
  }
  if (tree.edges.empty()) throw EmptyTreeSignal();
  for (std::size_t v = 0; v < n; ++v)
    if (included[v]) tree.vertices.push_back(v);
  return tree;
}

DirectedTree hre_mst(const FeatureDag& dag, const ScoredEdgeList& edges, const Instance& inst,
                     const RootChoice& root) {
  auto tree = hre_mst_edges(dag, edges, inst);
  return direct_tree(tree, choose_root(tree.vertices, root));
}

namespace {

// Tree over original feature indices -> same tree over positions in
// tree.features, the column order of the projected training set.
DirectedTree to_local(const DirectedTree& tree) {
  std::map<std::size_t, std::size_t> local;
  for (std::size_t p = 0; p < tree.features.size(); ++p) local[tree.features[p]] = p;
  DirectedTree out;
  out.features.resize(tree.features.size());
  for (std::size_t p = 0; p < out.features.size(); ++p) out.features[p] = p;
  out.root = local.at(tree.root);
  for (const auto& [child, parent] : tree.parent_of) out.parent_of[local.at(child)] = local.at(parent);
  return out;
}

TanModel local_model(const Dataset& train, const DirectedTree& tree, double smoothing) {
  return make_model(project(train, tree.features), to_local(tree), smoothing);
}

PredictionResult prior_only(const Dataset& train, double smoothing) {
  std::vector<double> scores;
  for (double p : class_prior(train, smoothing)) scores.push_back(std::log(p));
  return posterior_from_log_scores(scores);
}

std::vector<std::size_t> tree_key(const DirectedTree& tree) {
  std::vector<std::size_t> key{tree.root};
  for (const auto& [child, parent] : tree.parent_of) {
    key.push_back(child);
    key.push_back(parent);
  }
  return key;
}

}  // namespace

LazyPrediction classify_lazy(const Dataset& train, const FeatureDag& dag,
                             const ScoredEdgeList& edges, const Instance& inst,
                             const RootChoice& root, double smoothing) {
  if (train.n_features() != dag.n_features())
    throw DimensionError("training set and hierarchy feature counts differ");
  LazyPrediction out;
  try {
    out.tree = hre_mst(dag, edges, inst, root);
  } catch (const EmptyTreeSignal&) {
    out.result = prior_only(train, smoothing);
    return out;
  }
  const auto model = local_model(train, *out.tree, smoothing);
  out.result = classify(model, project_instance(inst, out.tree->features));
  return out;
}

std::vector<PredictionResult> evaluate_hre_tan(const Dataset& train, const Dataset& test,
                                               const FeatureDag& dag, const RootChoice& root,
                                               double smoothing) {
  if (train.n_features() != test.n_features() || train.n_features() != dag.n_features())
    throw DimensionError("train, test and hierarchy must share the feature universe");
  const auto edges = score_all_edges(train);

  // Identical trees give identical models; share them across instances.
  std::mutex cache_mutex;
  std::map<std::vector<std::size_t>, std::shared_ptr<const TanModel>> cache;

  std::vector<PredictionResult> results(test.n_instances());
  parallel_for(test.n_instances(), [&](std::size_t r) {
    const auto inst = test.instance(r);
    DirectedTree tree;
    try {
      tree = hre_mst(dag, edges, inst, root);
    } catch (const EmptyTreeSignal&) {
      results[r] = prior_only(train, smoothing);
      return;
    }
    const auto key = tree_key(tree);
    std::shared_ptr<const TanModel> model;
    {
      std::lock_guard lock(cache_mutex);
      if (auto it = cache.find(key); it != cache.end()) model = it->second;
    }
    if (!model) {
      model = std::make_shared<const TanModel>(local_model(train, tree, smoothing));
      std::lock_guard lock(cache_mutex);
      cache.emplace(key, model);
    }
    results[r] = classify(*model, project_instance(inst, tree.features));
  });
  return results;
}

std::vector<PredictionResult> evaluate_tan(const Dataset& train, const Dataset& test,
                                           const RootChoice& root, double smoothing) {
  if (train.n_features() != test.n_features())
    throw DimensionError("train and test must share the feature universe");
  const auto model = fit_tan(train, root, smoothing);
  std::vector<PredictionResult> results(test.n_instances());
  parallel_for(test.n_instances(),
               [&](std::size_t r) { results[r] = classify(model, test.instance(r)); });
  return results;
}

}  // namespace hretan
