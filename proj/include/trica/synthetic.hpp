#pragma once

#include <cstdint>
#include <vector>

#include "trica/graph.hpp"

namespace trica {

/// Planted-partition (stochastic block model) test fixture. Block
/// membership defines the class label; features are a per-block 0/1
/// prototype plus Gaussian noise of scale `feature_noise`.
struct PlantedPartitionParams {
  std::vector<int> block_sizes;  // at least two blocks
  double p_in = 0.5;
  double p_out = 0.05;
  int feature_dim = 8;
  double feature_noise = 0.5;
  std::uint64_t seed = 0;
};

/// Deterministic per seed: each within-block pair is an edge with
/// probability p_in, each cross-block pair with p_out. Node i of block b
/// is labeled "block<b>".
Network generate_planted_partition(const PlantedPartitionParams& params);

}  // namespace trica
