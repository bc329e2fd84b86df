#pragma once

#include <cstddef>
#include <cstdint>

#include "hretan/dataset.hpp"
#include "hretan/hierarchy.hpp"

namespace hretan {

// Random DAG over `n_features` terms named GO:0000000.. . Each term beyond
// the first few draws up to `max_parents` parents among lower-indexed terms
// with probability `parent_prob` each, so the result is acyclic.
FeatureDag random_dag(std::size_t n_features, std::size_t max_parents, double parent_prob,
                      std::uint64_t seed);

struct SynthParams {
  std::size_t n_instances = 200;
  double class_balance = 0.5;        // P(class = positive)
  double dependency_strength = 0.0;  // in [0, 1]
  std::uint64_t seed = 1;
};

/// Generates a hierarchy-consistent dataset over the DAG's features.
///
/// Every term gets a direct annotation drawn from class-conditional
/// Bernoulli rates. With probability `dependency_strength` a term copies a
/// latent per-row bit shared by its group (term index mod 4) instead, which
/// couples terms given the class. Annotations are then propagated upward to
/// all ancestors. Classes are named "anti" (0) and "pro" (1).
/// Throws ArgumentError on out-of-range parameters.
Dataset synthesize(const FeatureDag& dag, const SynthParams& params);

}  // namespace hretan
