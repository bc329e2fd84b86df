#include "hretan/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "hretan/errors.hpp"
#include "hretan/rng.hpp"

namespace hretan {

namespace {

constexpr std::size_t kGroups = 4;

std::string term_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "GO:%07zu", i);
  return buf;
}

}  // namespace

FeatureDag random_dag(std::size_t n_features, std::size_t max_parents, double parent_prob,
                      std::uint64_t seed) {
  if (n_features == 0) throw ArgumentError("hierarchy needs at least one term");
  if (!(parent_prob >= 0.0 && parent_prob <= 1.0))
    throw ArgumentError("parent probability must lie in [0, 1]");
  SplitMix64 rng(seed);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n_features; ++i) names.push_back(term_name(i));
  std::vector<std::pair<std::string, std::string>> edges;
  for (std::size_t child = 1; child < n_features; ++child) {
    for (std::size_t k = 0; k < max_parents; ++k) {
      if (!rng.bernoulli(parent_prob)) continue;
      const auto parent = rng.uniform_index(child);
      edges.emplace_back(names[child], names[parent]);
    }
  }
  return build_dag(names, edges);
}

Dataset synthesize(const FeatureDag& dag, const SynthParams& params) {
  if (params.n_instances == 0) throw ArgumentError("n_instances must be positive");
  if (!(params.class_balance > 0.0 && params.class_balance < 1.0))
    throw ArgumentError("class_balance must lie in (0, 1)");
  if (!(params.dependency_strength >= 0.0 && params.dependency_strength <= 1.0))
    throw ArgumentError("dependency_strength must lie in [0, 1]");

  const std::size_t n = dag.n_features();
  SplitMix64 rng(params.seed);

  // Direct annotation rates. Terms deeper in the hierarchy (more ancestors)
  // are annotated less often, as in GO.
  std::vector<std::array<double, 2>> rate(n);
  for (std::size_t f = 0; f < n; ++f) {
    const double depth_scale = 1.0 / (1.0 + 0.5 * static_cast<double>(dag.ancestors(f).size()));
    const double base = (0.05 + 0.30 * rng.uniform()) * depth_scale;
    const double shift = (rng.uniform() - 0.5) * 0.4 * depth_scale;
    rate[f][0] = std::clamp(base - shift / 2, 0.01, 0.95);
    rate[f][1] = std::clamp(base + shift / 2, 0.01, 0.95);
  }
  std::vector<std::array<double, 2>> group_rate(kGroups);
  for (auto& g : group_rate) {
    g[0] = 0.1 + 0.3 * rng.uniform();
    g[1] = 0.1 + 0.3 * rng.uniform();
  }

  std::vector<std::uint8_t> values(params.n_instances * n, 0);
  std::vector<std::size_t> labels(params.n_instances);
  std::vector<std::uint8_t> latent(kGroups);
  for (std::size_t r = 0; r < params.n_instances; ++r) {
    const std::size_t c = rng.bernoulli(params.class_balance) ? 1 : 0;
    labels[r] = c;
    for (std::size_t g = 0; g < kGroups; ++g) latent[g] = rng.bernoulli(group_rate[g][c]);
    std::uint8_t* row = values.data() + r * n;
    for (std::size_t f = 0; f < n; ++f) {
      const bool coupled = rng.bernoulli(params.dependency_strength);
      const bool direct = rng.bernoulli(rate[f][c]);
      if (coupled ? latent[f % kGroups] : direct) {
        row[f] = 1;
        for (auto a : dag.ancestors(f)) row[a] = 1;
      }
    }
  }
  return Dataset(dag.feature_names(), "class", {"anti", "pro"}, std::move(values),
                 std::move(labels));
}

}  // namespace hretan
