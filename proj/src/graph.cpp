#include "trica/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "trica/rng.hpp"

namespace trica {

Network::Network(std::vector<std::string> node_ids,
                 const std::vector<std::pair<int, int>>& edges,
                 Eigen::MatrixXd features,
                 const std::vector<std::string>& label_names,
                 const std::vector<std::string>& extra_classes)
    : node_ids_(std::move(node_ids)), features_(std::move(features)) {
  const int n = static_cast<int>(node_ids_.size());
  if (features_.size() == 0) features_.resize(n, 0);
  if (features_.rows() != n)
    throw std::invalid_argument("feature row count does not match node count");
  if (static_cast<int>(label_names.size()) != n)
    throw std::invalid_argument("label count does not match node count");

  // Canonical class set: sorted union of observed and declared names.
  std::set<std::string> classes(extra_classes.begin(), extra_classes.end());
  for (const auto& name : label_names)
    if (!name.empty()) classes.insert(name);
  class_names_.assign(classes.begin(), classes.end());

  labels_.resize(n, -1);
  for (int i = 0; i < n; ++i) {
    if (label_names[i].empty()) continue;
    labels_[i] = class_index(label_names[i]);
  }

  // Symmetrize, drop self-loops and duplicates.
  std::vector<std::set<int>> adj(n);
  for (const auto& [a, b] : edges) {
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw std::invalid_argument("edge endpoint out of range");
    if (a == b) continue;
    adj[a].insert(b);
    adj[b].insert(a);
  }
  adjacency_.resize(n);
  for (int i = 0; i < n; ++i) {
    adjacency_[i].assign(adj[i].begin(), adj[i].end());
    edge_count_ += adjacency_[i].size();
  }
  edge_count_ /= 2;
}

int Network::class_index(const std::string& name) const {
  auto it = std::lower_bound(class_names_.begin(), class_names_.end(), name);
  if (it == class_names_.end() || *it != name) return -1;
  return static_cast<int>(it - class_names_.begin());
}

const std::vector<int>& Network::neighbors(int node) const {
  if (node < 0 || node >= node_count())
    throw std::out_of_range("node index out of range");
  return adjacency_[node];
}

bool Network::has_edge(int i, int j) const {
  const auto& a = neighbors(i);
  return std::binary_search(a.begin(), a.end(), j);
}

std::vector<std::pair<int, int>> Network::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count_);
  for (int i = 0; i < node_count(); ++i)
    for (int j : adjacency_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

int Network::labeled_count() const {
  int c = 0;
  for (int l : labels_)
    if (l >= 0) ++c;
  return c;
}

int largest_class(const Network& network) {
  std::vector<int> counts(network.class_count(), 0);
  for (int i = 0; i < network.node_count(); ++i)
    if (network.is_labeled(i)) ++counts[network.label(i)];
  int best = -1;
  for (int c = 0; c < network.class_count(); ++c)
    if (counts[c] > 0 && (best < 0 || counts[c] > counts[best])) best = c;
  if (best < 0) throw std::invalid_argument("network has no labeled nodes");
  return best;
}

Network binarize_labels(const Network& network, const std::string& positive) {
  if (network.class_index(positive) < 0)
    throw std::invalid_argument("unknown class: " + positive);
  const std::string negative = "not-" + positive;
  std::vector<std::string> labels(network.node_count());
  for (int i = 0; i < network.node_count(); ++i) {
    if (!network.is_labeled(i)) continue;
    labels[i] =
        network.class_name(network.label(i)) == positive ? positive : negative;
  }
  return Network(network.node_ids(), network.edges(), network.features(),
                 labels, {positive, negative});
}

LabeledSplit split_labeled(const Network& network, double fraction,
                           std::uint64_t seed, bool stratified) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("fraction must be in (0, 1]");
  const int n = network.node_count();
  for (int i = 0; i < n; ++i)
    if (!network.is_labeled(i))
      throw std::invalid_argument("split requires a fully labeled network");

  // Half away from zero, per llround.
  int target = static_cast<int>(std::llround(fraction * n));
  target = std::min(target, n);

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<char> picked(n, 0);
  int picked_count = 0;
  if (stratified) {
    // First node of each class in shuffled order, while budget remains.
    std::vector<char> seen(network.class_count(), 0);
    for (int idx : order) {
      if (picked_count >= target) break;
      int c = network.label(idx);
      if (!seen[c]) {
        seen[c] = 1;
        picked[idx] = 1;
        ++picked_count;
      }
    }
  }
  for (int idx : order) {
    if (picked_count >= target) break;
    if (!picked[idx]) {
      picked[idx] = 1;
      ++picked_count;
    }
  }

  LabeledSplit split;
  split.fraction = fraction;
  split.seed = seed;
  split.stratified = stratified;
  for (int i = 0; i < n; ++i)
    (picked[i] ? split.labeled : split.unlabeled).push_back(i);
  return split;
}

}  // namespace trica
