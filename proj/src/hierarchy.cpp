#include "hretan/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "hretan/errors.hpp"

namespace hretan {

namespace {

enum class Mark : std::uint8_t { Unvisited, InProgress, Done };

// Memoized depth-first closure over the parent relation. `stack` holds the
// current DFS path so a back edge can be reported as a concrete cycle.
struct ClosureBuilder {
  const std::vector<std::string>& names;
  const std::vector<std::vector<std::size_t>>& parents;
  std::vector<std::vector<bool>>& is_ancestor;
  std::vector<Mark> mark;
  std::vector<std::size_t> stack;

  void visit(std::size_t v) {
    mark[v] = Mark::InProgress;
    stack.push_back(v);
    for (auto p : parents[v]) {
      if (mark[p] == Mark::InProgress) report_cycle(p);
      if (mark[p] == Mark::Unvisited) visit(p);
      is_ancestor[v][p] = true;
      for (std::size_t a = 0; a < names.size(); ++a)
        if (is_ancestor[p][a]) is_ancestor[v][a] = true;
    }
    stack.pop_back();
    mark[v] = Mark::Done;
  }

  [[noreturn]] void report_cycle(std::size_t back_to) const {
    auto it = std::find(stack.begin(), stack.end(), back_to);
    std::string msg = "cycle in feature hierarchy: ";
    for (; it != stack.end(); ++it) msg += names[*it] + " -> ";
    msg += names[back_to];
    throw CycleError(msg);
  }
};

}  // namespace

bool FeatureDag::is_ancestor(std::size_t ancestor, std::size_t of) const {
  return relation_[of * n_features() + ancestor] == 1;
}

bool FeatureDag::related(std::size_t i, std::size_t j) const {
  return relation_[i * n_features() + j] != 0;
}

std::size_t FeatureDag::edge_count() const {
  std::size_t n = 0;
  for (const auto& p : parents_) n += p.size();
  return n;
}

std::size_t FeatureDag::index_of(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw UnknownFeatureError("unknown feature '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

FeatureDag build_dag(const std::vector<std::string>& feature_names,
                     const std::vector<std::pair<std::string, std::string>>& edges) {
  const std::size_t n = feature_names.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i)
    if (!index.emplace(feature_names[i], i).second)
      throw DuplicateFeatureError("duplicate feature '" + feature_names[i] + "'");

  auto lookup = [&](const std::string& name) {
    auto it = index.find(name);
    if (it == index.end()) throw UnknownFeatureError("unknown feature '" + name + "'");
    return it->second;
  };

  FeatureDag dag;
  dag.names_ = feature_names;
  dag.parents_.assign(n, {});
  for (const auto& [child, parent] : edges) {
    const auto c = lookup(child);
    const auto p = lookup(parent);
    if (c == p) throw CycleError("cycle in feature hierarchy: " + child + " -> " + child);
    dag.parents_[c].push_back(p);
  }
  for (auto& ps : dag.parents_) {
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  }

  std::vector<std::vector<bool>> is_anc(n, std::vector<bool>(n, false));
  ClosureBuilder builder{feature_names, dag.parents_, is_anc,
                         std::vector<Mark>(n, Mark::Unvisited), {}};
  for (std::size_t v = 0; v < n; ++v)
    if (builder.mark[v] == Mark::Unvisited) builder.visit(v);

  dag.ancestors_.assign(n, {});
  dag.descendants_.assign(n, {});
  dag.relatives_.assign(n, {});
  dag.relation_.assign(n * n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t a = 0; a < n; ++a) {
      if (!is_anc[v][a]) continue;
      dag.ancestors_[v].push_back(a);
      dag.descendants_[a].push_back(v);
      dag.relation_[v * n + a] = 1;
      dag.relation_[a * n + v] = 2;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(dag.descendants_[v].begin(), dag.descendants_[v].end());
    auto& rel = dag.relatives_[v];
    std::merge(dag.ancestors_[v].begin(), dag.ancestors_[v].end(), dag.descendants_[v].begin(),
               dag.descendants_[v].end(), std::back_inserter(rel));
  }
  return dag;
}

std::vector<std::pair<std::string, std::string>> parse_dag_edges(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(line_no, "expected 'child<TAB>parent'");
    auto child = line.substr(0, tab);
    auto parent = line.substr(tab + 1);
    if (child.empty() || parent.empty()) throw ParseError(line_no, "empty term name");
    edges.emplace_back(std::move(child), std::move(parent));
  }
  return edges;
}

std::vector<std::pair<std::string, std::string>> load_dag_edges(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open DAG file '" + path + "'");
  return parse_dag_edges(in);
}

std::string serialize_dag_edges(const FeatureDag& dag) {
  std::string out;
  for (std::size_t c = 0; c < dag.n_features(); ++c)
    for (auto p : dag.parents(c))
      out += dag.feature_names()[c] + '\t' + dag.feature_names()[p] + '\n';
  return out;
}

bool is_hierarchically_redundant(const FeatureDag& dag, std::size_t i, std::size_t j,
                                 const Instance& inst) {
  const auto n = dag.n_features();
  if (i >= n || j >= n) throw IndexError("feature index out of range");
  if (i == j) throw IndexError("redundancy query needs two distinct features");
  if (inst.size() != n) throw DimensionError("instance size does not match the hierarchy");
  return dag.related(i, j) && inst[i] == inst[j];
}

std::vector<TruePathViolation> validate_true_path(const FeatureDag& dag, const Dataset& data) {
  if (data.n_features() != dag.n_features())
    throw DimensionError("dataset has " + std::to_string(data.n_features()) +
                         " features, hierarchy has " + std::to_string(dag.n_features()));
  std::vector<TruePathViolation> out;
  for (std::size_t r = 0; r < data.n_instances(); ++r) {
    auto row = data.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i]) continue;
      for (auto a : dag.ancestors(i))
        if (!row[a]) out.push_back({r, i, a});
    }
  }
  return out;
}

Dataset repair_true_path(const FeatureDag& dag, const Dataset& data) {
  if (data.n_features() != dag.n_features())
    throw DimensionError("dataset and hierarchy feature counts differ");
  std::vector<std::uint8_t> values = data.values();
  const auto n = data.n_features();
  for (std::size_t r = 0; r < data.n_instances(); ++r) {
    auto row = data.row(r);
    for (std::size_t i = 0; i < n; ++i)
      if (row[i])
        for (auto a : dag.ancestors(i)) values[r * n + a] = 1;
  }
  return Dataset(data.feature_names(), data.class_column(), data.class_names(), std::move(values),
                 data.labels());
}

}  // namespace hretan
