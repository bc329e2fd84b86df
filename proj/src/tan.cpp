#include "hretan/tan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "hretan/errors.hpp"
#include "hretan/rng.hpp"
#include "hretan/union_find.hpp"
#include "json.hpp"

namespace hretan {

double UndirectedTree::total_weight(const ScoredEdgeList& scored) const {
  double w = 0.0;
  for (const auto& e : scored.edges())
    for (const auto& [a, b] : edges)
      if (e.i == a && e.j == b) w += e.cmi;
  return w;
}

std::size_t choose_root(const std::vector<std::size_t>& vertices, const RootChoice& choice) {
  if (vertices.empty()) throw StructureError("cannot choose a root of an empty tree");
  if (choice.policy == RootPolicy::First) return *std::min_element(vertices.begin(), vertices.end());
  SplitMix64 rng(choice.seed);
  return vertices[rng.uniform_index(vertices.size())];
}

UndirectedTree build_mst(const ScoredEdgeList& edges, std::size_t n_features) {
  if (n_features == 0) throw ArgumentError("spanning tree needs at least one feature");
  if (edges.n_features() != n_features)
    throw ArgumentError("edge list does not match the feature count");
  UndirectedTree tree;
  tree.vertices.resize(n_features);
  for (std::size_t v = 0; v < n_features; ++v) tree.vertices[v] = v;
  UnionFind uf(n_features);
  for (const auto& e : edges.edges()) {
    if (uf.unite(e.i, e.j)) {
      tree.edges.emplace_back(e.i, e.j);
      if (tree.edges.size() + 1 == n_features) break;
    }
  }
  return tree;
}

DirectedTree direct_tree(const UndirectedTree& tree, std::size_t root) {
  const auto& vs = tree.vertices;
  if (!std::binary_search(vs.begin(), vs.end(), root))
    throw StructureError("root " + std::to_string(root) + " is not a tree vertex");
  if (tree.edges.size() + 1 != vs.size())
    throw StructureError("edge count does not match a spanning tree");

  auto pos = [&](std::size_t v) {
    auto it = std::lower_bound(vs.begin(), vs.end(), v);
    if (it == vs.end() || *it != v) throw StructureError("edge endpoint is not a tree vertex");
    return static_cast<std::size_t>(it - vs.begin());
  };
  std::vector<std::vector<std::size_t>> adj(vs.size());
  for (const auto& [a, b] : tree.edges) {
    adj[pos(a)].push_back(b);
    adj[pos(b)].push_back(a);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());

  DirectedTree out;
  out.features = vs;
  out.root = root;
  std::vector<bool> seen(vs.size(), false);
  std::queue<std::size_t> frontier;
  frontier.push(root);
  seen[pos(root)] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const auto v = frontier.front();
    frontier.pop();
    for (auto w : adj[pos(v)]) {
      if (seen[pos(w)]) continue;
      seen[pos(w)] = true;
      ++reached;
      out.parent_of[w] = v;
      frontier.push(w);
    }
  }
  if (reached != vs.size()) throw StructureError("tree is not connected");
  return out;
}

TanModel make_model(const Dataset& train, DirectedTree tree, double smoothing) {
  TanModel model;
  model.n_features = train.n_features();
  model.cpt = estimate_cpts(train, tree, smoothing);
  model.tree = std::move(tree);
  model.feature_names = train.feature_names();
  model.class_names = train.class_names();
  return model;
}

TanModel fit_tan(const Dataset& train, const RootChoice& root, double smoothing) {
  const auto edges = score_all_edges(train);
  const auto mst = build_mst(edges, train.n_features());
  return make_model(train, direct_tree(mst, choose_root(mst.vertices, root)), smoothing);
}

PredictionResult posterior_from_log_scores(const std::vector<double>& log_scores) {
  PredictionResult out;
  out.posterior.assign(log_scores.size(), 0.0);
  const double top = *std::max_element(log_scores.begin(), log_scores.end());
  if (top == -std::numeric_limits<double>::infinity()) {
    // every class impossible: report uniform
    std::fill(out.posterior.begin(), out.posterior.end(), 1.0 / log_scores.size());
    return out;
  }
  double z = 0.0;
  for (std::size_t c = 0; c < log_scores.size(); ++c) {
    out.posterior[c] = std::exp(log_scores[c] - top);
    z += out.posterior[c];
  }
  for (auto& p : out.posterior) p /= z;
  out.label = static_cast<std::size_t>(
      std::max_element(out.posterior.begin(), out.posterior.end()) - out.posterior.begin());
  return out;
}

PredictionResult classify(const TanModel& model, const Instance& inst) {
  if (inst.size() != model.n_features)
    throw DimensionError("instance has " + std::to_string(inst.size()) + " features, model expects " +
                         std::to_string(model.n_features));
  const auto k = model.cpt.class_prior.size();
  std::vector<double> scores(k);
  for (std::size_t c = 0; c < k; ++c) {
    double s = std::log(model.cpt.class_prior[c]);
    for (const auto& node : model.cpt.nodes) {
      const std::uint8_t u = node.parent ? inst[*node.parent] : 0;
      s += std::log(node.prob(c, u, inst[node.feature]));
    }
    scores[c] = s;
  }
  return posterior_from_log_scores(scores);
}

std::string model_to_json(const TanModel& model) {
  nlohmann::json j;
  j["root"] = model.feature_names[model.tree.root];
  j["features"] = nlohmann::json::array();
  for (auto f : model.tree.features) j["features"].push_back(model.feature_names[f]);
  j["edges"] = nlohmann::json::array();
  for (const auto& [child, parent] : model.tree.parent_of)
    j["edges"].push_back({model.feature_names[parent], model.feature_names[child]});
  j["class_names"] = model.class_names;
  j["cpt"]["class_prior"] = model.cpt.class_prior;
  j["cpt"]["nodes"] = nlohmann::json::array();
  for (const auto& node : model.cpt.nodes) {
    nlohmann::json n;
    n["feature"] = model.feature_names[node.feature];
    n["parent"] = node.parent ? nlohmann::json(model.feature_names[*node.parent]) : nlohmann::json();
    n["table"] = node.table;
    j["cpt"]["nodes"].push_back(std::move(n));
  }
  return j.dump(2) + "\n";
}

}  // namespace hretan
