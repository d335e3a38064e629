#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "trica/graph.hpp"
#include "trica/rng.hpp"

namespace trica::testing {

/// Small hand-built network; labels[i] may be "" for unlabeled, and an
/// empty vector means every node gets class "a".
inline Network toy_network(int n, std::vector<std::pair<int, int>> edges,
                           std::vector<std::string> labels = {},
                           Eigen::MatrixXd features = Eigen::MatrixXd()) {
  std::vector<std::string> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = "n" + std::to_string(i);
  if (labels.empty()) labels.assign(n, "a");
  if (features.size() == 0) features = Eigen::MatrixXd::Zero(n, 1);
  return Network(std::move(ids), edges, std::move(features), labels);
}

/// Erdos-Renyi graph with two alternating classes and 1-d features.
inline Network random_graph(int n, double edge_prob, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform01() < edge_prob) edges.emplace_back(i, j);
  std::vector<std::string> labels(n);
  Eigen::MatrixXd features(n, 1);
  for (int i = 0; i < n; ++i) {
    labels[i] = i % 2 == 0 ? "a" : "b";
    features(i, 0) = rng.uniform01();
  }
  std::vector<std::string> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = "n" + std::to_string(i);
  return Network(std::move(ids), edges, std::move(features), labels);
}

/// Nonnegative matrix with orthonormal columns: rows are split into k
/// contiguous groups and column j carries 1/sqrt(|group j|) on group j.
inline Eigen::MatrixXd group_indicator_factor(int rows, int k) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(rows, k);
  int base = rows / k, extra = rows % k, row = 0;
  for (int j = 0; j < k; ++j) {
    int size = base + (j < extra ? 1 : 0);
    for (int r = 0; r < size; ++r) f(row++, j) = 1.0 / std::sqrt(double(size));
  }
  return f;
}

/// Group index of each row under the same contiguous split.
inline std::vector<int> group_of_rows(int rows, int k) {
  std::vector<int> g(rows);
  int base = rows / k, extra = rows % k, row = 0;
  for (int j = 0; j < k; ++j) {
    int size = base + (j < extra ? 1 : 0);
    for (int r = 0; r < size; ++r) g[row++] = j;
  }
  return g;
}

/// Pair of propagation-like matrices built from planted rank-k factors
/// with orthonormal nonnegative column groups, plus a little uniform
/// nonnegative noise. target_groups holds the group id of each target
/// row (the class structure the latent features should recover).
struct PlantedJointPair {
  Eigen::MatrixXd ps, pt;
  std::vector<int> target_groups;
};

inline PlantedJointPair planted_joint_pair(int m, int n, int k_true,
                                           double noise_rel,
                                           std::uint64_t seed) {
  Eigen::MatrixXd fs = group_indicator_factor(m, k_true);
  Eigen::MatrixXd rs = group_indicator_factor(m, k_true);
  Eigen::MatrixXd ft = group_indicator_factor(n, k_true);
  Eigen::MatrixXd rt = group_indicator_factor(n, k_true);
  Rng core_rng(seed);
  Eigen::MatrixXd a(k_true, k_true);
  for (int i = 0; i < k_true; ++i)
    for (int j = 0; j < k_true; ++j)
      a(i, j) = (i == j ? 2.0 : 0.2) + 0.3 * core_rng.uniform01();
  PlantedJointPair pair;
  pair.ps = fs * a * rs.transpose();
  pair.pt = ft * a * rt.transpose();
  Rng noise_rng(seed * 31);
  double ss = noise_rel * pair.ps.mean(), st = noise_rel * pair.pt.mean();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) pair.ps(i, j) += ss * noise_rng.uniform01();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pair.pt(i, j) += st * noise_rng.uniform01();
  pair.target_groups = group_of_rows(n, k_true);
  return pair;
}

/// Independent brute-force baseline: each unlabeled node takes the
/// majority vote of its neighbors' true labels; ties and isolated nodes
/// fall back to the given default class.
inline double majority_vote_oracle_accuracy(const Network& net,
                                            const LabeledSplit& split,
                                            int default_class) {
  long correct = 0;
  for (int i : split.unlabeled) {
    std::vector<int> counts(net.class_count(), 0);
    for (int j : net.neighbors(i)) ++counts[net.label(j)];
    int best = default_class;
    int best_count = counts[default_class];
    for (int c = 0; c < net.class_count(); ++c)
      if (counts[c] > best_count) {
        best = c;
        best_count = counts[c];
      }
    if (best == net.label(i)) ++correct;
  }
  return double(correct) / double(split.unlabeled.size());
}

}  // namespace trica::testing
