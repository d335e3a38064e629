#include "trica/synthetic.hpp"

#include <stdexcept>
#include <string>

#include "trica/rng.hpp"

namespace trica {

Network generate_planted_partition(const PlantedPartitionParams& params) {
  if (params.block_sizes.size() < 2)
    throw std::invalid_argument("need at least two blocks");
  for (int s : params.block_sizes)
    if (s <= 0) throw std::invalid_argument("block sizes must be positive");
  auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!is_prob(params.p_in) || !is_prob(params.p_out))
    throw std::invalid_argument("p_in and p_out must be probabilities");
  if (params.feature_dim <= 0)
    throw std::invalid_argument("feature_dim must be positive");
  if (params.feature_noise < 0.0)
    throw std::invalid_argument("feature_noise must be nonnegative");

  const int blocks = static_cast<int>(params.block_sizes.size());
  std::vector<int> block_of;
  for (int b = 0; b < blocks; ++b)
    block_of.insert(block_of.end(), params.block_sizes[b], b);
  const int n = static_cast<int>(block_of.size());

  Rng rng(params.seed);

  // One uniform draw per pair regardless of parameters, so the stream
  // (and hence features) only depends on n and the seed.
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double p = block_of[i] == block_of[j] ? params.p_in : params.p_out;
      if (rng.uniform01() < p) edges.emplace_back(i, j);
    }
  }

  // Block prototypes assign feature dimensions round-robin.
  Eigen::MatrixXd features(n, params.feature_dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < params.feature_dim; ++j) {
      double proto = (j % blocks == block_of[i]) ? 1.0 : 0.0;
      features(i, j) = proto + params.feature_noise * rng.normal();
    }
  }

  std::vector<std::string> node_ids(n), labels(n);
  for (int i = 0; i < n; ++i) {
    node_ids[i] = "n" + std::to_string(i);
    labels[i] = "block" + std::to_string(block_of[i]);
  }
  return Network(std::move(node_ids), edges, std::move(features), labels);
}

}  // namespace trica
