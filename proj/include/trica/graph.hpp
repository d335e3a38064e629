#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace trica {

/// Attributed undirected graph with per-node features, an optional class
/// label per node, and a canonical (lexicographically sorted) class set.
/// Immutable after construction; safe to share across threads.
class Network {
 public:
  /// Builds a network from raw parts. Edges are symmetrized, deduplicated
  /// and stripped of self-loops. `label_names[i]` is "" for an unlabeled
  /// node. `extra_classes` may declare classes that no node currently
  /// carries (the class set is the union, sorted).
  Network(std::vector<std::string> node_ids,
          const std::vector<std::pair<int, int>>& edges,
          Eigen::MatrixXd features,
          const std::vector<std::string>& label_names,
          const std::vector<std::string>& extra_classes = {});

  int node_count() const { return static_cast<int>(node_ids_.size()); }
  int feature_dim() const { return static_cast<int>(features_.cols()); }
  int class_count() const { return static_cast<int>(class_names_.size()); }
  std::size_t edge_count() const { return edge_count_; }

  const std::vector<std::string>& node_ids() const { return node_ids_; }
  const std::string& node_id(int i) const { return node_ids_.at(i); }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::string& class_name(int c) const { return class_names_.at(c); }
  /// Index of a class name in canonical order, -1 if absent.
  int class_index(const std::string& name) const;

  /// Sorted, deduplicated adjacency of `node` (never contains `node`).
  /// Throws std::out_of_range for an invalid index.
  const std::vector<int>& neighbors(int node) const;
  bool has_edge(int i, int j) const;
  /// All undirected edges as (i, j) with i < j, sorted.
  std::vector<std::pair<int, int>> edges() const;

  const Eigen::MatrixXd& features() const { return features_; }

  /// Class index of node i, or -1 when unlabeled.
  int label(int i) const { return labels_.at(i); }
  bool is_labeled(int i) const { return labels_.at(i) >= 0; }
  const std::vector<int>& labels() const { return labels_; }
  int labeled_count() const;

 private:
  std::vector<std::string> node_ids_;
  std::vector<std::string> class_names_;
  std::vector<std::vector<int>> adjacency_;
  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  std::size_t edge_count_ = 0;
};

/// Labeled/unlabeled partition of a fully labeled network.
struct LabeledSplit {
  std::vector<int> labeled;    // sorted indices
  std::vector<int> unlabeled;  // sorted complement
  double fraction = 0.0;
  std::uint64_t seed = 0;
  bool stratified = false;
};

/// Class index with the most labeled nodes; ties go to the class that
/// comes first in canonical order. Throws if no node is labeled.
int largest_class(const Network& network);

/// Collapses the label set to {positive, "not-"+positive}: nodes labeled
/// `positive` keep their label, every other labeled node becomes negative,
/// unlabeled nodes stay unlabeled. Throws on an unknown class name.
Network binarize_labels(const Network& network, const std::string& positive);

/// Draws |labeled| = round(fraction * n) nodes (round half away from zero),
/// deterministically per seed. With `stratified`, every class gets at least
/// one labeled node when the budget allows. Requires a fully labeled
/// network and fraction in (0, 1].
LabeledSplit split_labeled(const Network& network, double fraction,
                           std::uint64_t seed, bool stratified = false);

}  // namespace trica
