#include "hretan/estimation.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "hretan/errors.hpp"
#include "hretan/parallel.hpp"
#include "hretan/tan.hpp"

namespace hretan {

namespace {

// n[c][vi][vj] joint counts of two binary features within each class.
using PairCounts = std::vector<std::array<std::array<std::size_t, 2>, 2>>;

double cmi_from_counts(const PairCounts& counts, std::size_t total) {
  const double n = static_cast<double>(total);
  double sum = 0.0;
  for (const auto& cell : counts) {
    const std::size_t n_c = cell[0][0] + cell[0][1] + cell[1][0] + cell[1][1];
    if (n_c == 0) continue;
    const std::size_t row[2] = {cell[0][0] + cell[0][1], cell[1][0] + cell[1][1]};
    const std::size_t col[2] = {cell[0][0] + cell[1][0], cell[0][1] + cell[1][1]};
    for (int vi = 0; vi < 2; ++vi) {
      for (int vj = 0; vj < 2; ++vj) {
        const std::size_t joint = cell[vi][vj];
        if (joint == 0) continue;
        const double ratio = (static_cast<double>(joint) * static_cast<double>(n_c)) /
                             (static_cast<double>(row[vi]) * static_cast<double>(col[vj]));
        sum += static_cast<double>(joint) / n * std::log(ratio);
      }
    }
  }
  return sum < 0.0 ? 0.0 : sum;
}

// Column-wise bitsets: bits of feature f set where the value is 1, plus one
// mask per class. Pair counts reduce to popcounts.
class BitColumns {
 public:
  explicit BitColumns(const Dataset& data)
      : words_((data.n_instances() + 63) / 64),
        cols_(data.n_features() * words_, 0),
        class_masks_(data.n_classes() * words_, 0),
        class_sizes_(data.n_classes(), 0),
        ones_(data.n_features() * data.n_classes(), 0),
        n_classes_(data.n_classes()) {
    const auto nf = data.n_features();
    for (std::size_t r = 0; r < data.n_instances(); ++r) {
      const auto word = r / 64;
      const std::uint64_t bit = std::uint64_t{1} << (r % 64);
      const auto c = data.label(r);
      class_masks_[c * words_ + word] |= bit;
      ++class_sizes_[c];
      auto row = data.row(r);
      for (std::size_t f = 0; f < nf; ++f) {
        if (row[f]) {
          cols_[f * words_ + word] |= bit;
          ++ones_[f * n_classes_ + c];
        }
      }
    }
  }

  PairCounts pair_counts(std::size_t i, std::size_t j) const {
    PairCounts counts(n_classes_);
    const std::uint64_t* a = cols_.data() + i * words_;
    const std::uint64_t* b = cols_.data() + j * words_;
    for (std::size_t c = 0; c < n_classes_; ++c) {
      const std::uint64_t* m = class_masks_.data() + c * words_;
      std::size_t both = 0;
      for (std::size_t w = 0; w < words_; ++w) both += std::popcount(a[w] & b[w] & m[w]);
      const std::size_t i1 = ones_[i * n_classes_ + c];
      const std::size_t j1 = ones_[j * n_classes_ + c];
      auto& cell = counts[c];
      cell[1][1] = both;
      cell[1][0] = i1 - both;
      cell[0][1] = j1 - both;
      cell[0][0] = class_sizes_[c] - i1 - j1 + both;
    }
    return counts;
  }

 private:
  std::size_t words_;
  std::vector<std::uint64_t> cols_;
  std::vector<std::uint64_t> class_masks_;
  std::vector<std::size_t> class_sizes_;
  std::vector<std::size_t> ones_;
  std::size_t n_classes_;
};

}  // namespace

std::vector<double> class_prior(const Dataset& train, double smoothing) {
  if (smoothing < 0.0) throw ArgumentError("smoothing must be non-negative");
  std::vector<double> counts(train.n_classes(), 0.0);
  for (auto l : train.labels()) counts[l] += 1.0;
  const double denom = static_cast<double>(train.n_instances()) +
                       smoothing * static_cast<double>(train.n_classes());
  for (auto& c : counts) c = (c + smoothing) / denom;
  return counts;
}

double conditional_mutual_information(const Dataset& train, std::size_t i, std::size_t j) {
  if (i >= train.n_features() || j >= train.n_features())
    throw IndexError("feature index out of range");
  if (i == j) throw IndexError("CMI needs two distinct features");
  if (i > j) std::swap(i, j);
  PairCounts counts(train.n_classes());
  for (std::size_t r = 0; r < train.n_instances(); ++r)
    ++counts[train.label(r)][train.value(r, i)][train.value(r, j)];
  return cmi_from_counts(counts, train.n_instances());
}

ScoredEdgeList::ScoredEdgeList(std::size_t n_features, std::vector<ScoredEdge> edges)
    : n_features_(n_features), edges_(std::move(edges)) {
  const std::size_t expected = n_features * (n_features - (n_features > 0)) / 2;
  if (edges_.size() != expected)
    throw ArgumentError("edge list must cover all " + std::to_string(expected) + " pairs");
  std::vector<bool> seen(n_features * n_features, false);
  for (auto& e : edges_) {
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.j >= n_features || e.i == e.j) throw ArgumentError("invalid edge endpoints");
    if (!(e.cmi >= 0.0)) throw ArgumentError("edge weight must be non-negative");
    if (seen[e.i * n_features + e.j]) throw ArgumentError("edge repeated");
    seen[e.i * n_features + e.j] = true;
  }
  std::sort(edges_.begin(), edges_.end(), [](const ScoredEdge& a, const ScoredEdge& b) {
    if (a.cmi != b.cmi) return a.cmi > b.cmi;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  status_.assign(edges_.size(), EdgeStatus::Available);
  incident_.assign(n_features, {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    incident_[edges_[k].i].push_back(k);
    incident_[edges_[k].j].push_back(k);
  }
}

ScoredEdgeList score_all_edges(const Dataset& train) {
  const std::size_t n = train.n_features();
  const BitColumns bits(train);
  std::vector<ScoredEdge> edges(n * (n - 1) / 2);
  // Row i owns the contiguous block of pairs (i, i+1..n-1).
  std::vector<std::size_t> offset(n, 0);
  for (std::size_t i = 1; i < n; ++i) offset[i] = offset[i - 1] + (n - i);
  parallel_for(n - 1, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      edges[offset[i] + (j - i - 1)] =
          ScoredEdge{i, j, cmi_from_counts(bits.pair_counts(i, j), train.n_instances())};
  });
  return ScoredEdgeList(n, std::move(edges));
}

Cpt estimate_cpts(const Dataset& train, const DirectedTree& tree, double smoothing) {
  if (smoothing < 0.0) throw ArgumentError("smoothing must be non-negative");
  const auto nf = train.n_features();
  auto check = [&](std::size_t f) {
    if (f >= nf) throw StructureError("tree references unknown feature " + std::to_string(f));
  };
  for (auto f : tree.features) check(f);
  check(tree.root);
  for (const auto& [child, parent] : tree.parent_of) {
    check(child);
    check(parent);
  }

  const auto k = train.n_classes();
  Cpt cpt;
  cpt.class_prior = class_prior(train, smoothing);
  cpt.nodes.reserve(tree.features.size());
  for (auto f : tree.features) {
    CptNode node{f, std::nullopt, {}};
    if (auto it = tree.parent_of.find(f); it != tree.parent_of.end()) node.parent = it->second;
    const std::size_t parent_states = node.parent ? 2 : 1;
    std::vector<double> counts(k * parent_states * 2, 0.0);
    for (std::size_t r = 0; r < train.n_instances(); ++r) {
      const std::size_t u = node.parent ? train.value(r, *node.parent) : 0;
      counts[(train.label(r) * parent_states + u) * 2 + train.value(r, f)] += 1.0;
    }
    node.table.resize(counts.size());
    for (std::size_t cell = 0; cell < counts.size(); cell += 2) {
      const double denom = counts[cell] + counts[cell + 1] + 2.0 * smoothing;
      if (denom == 0.0) {
        node.table[cell] = node.table[cell + 1] = 0.5;
      } else {
        node.table[cell] = (counts[cell] + smoothing) / denom;
        node.table[cell + 1] = (counts[cell + 1] + smoothing) / denom;
      }
    }
    cpt.nodes.push_back(std::move(node));
  }
  return cpt;
}

}  // namespace hretan
