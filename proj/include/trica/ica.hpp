#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "trica/factorization.hpp"
#include "trica/graph.hpp"
#include "trica/logistic.hpp"
#include "trica/propagation.hpp"

namespace trica {

enum class Aggregation { proportion, count, mode };

struct IcaConfig {
  int max_iterations = 100;
  std::uint64_t seed = 0;  // drives the per-pass node orderings
  Aggregation aggregation = Aggregation::proportion;
  // Stop a pass loop once the number of label changes in a pass is at or
  // below this threshold.
  int stability_threshold = 0;
  bool retrain_each_pass = false;
  // Class treated as the logistic positive; -1 picks the largest class
  // among the split's labeled nodes.
  int positive_class = -1;
  // Rescale the latent block by one scalar so its mean absolute entry
  // matches the content block's. Factor rows are orders of magnitude
  // smaller than typical content features, which starves them of
  // gradient under an L2-regularized base model; set false for the raw
  // rows.
  bool scale_latent = true;
};

/// Per-class aggregation of the current label assignments over a node's
/// neighbors. `current[i]` is a class index or -1 when unassigned.
/// proportion: counts divided by the number of assigned neighbors (all
/// zero when none); count: raw counts; mode: one-hot at the most common
/// class, ties to the smaller class index.
Eigen::VectorXd relational_features(const Network& network,
                                    const std::vector<int>& current, int node,
                                    Aggregation aggregation);

struct IcaResult {
  std::vector<int> labels;          // class index per node
  std::vector<double> probability;  // positive-class probability per node
  int passes = 0;
  bool stabilized = false;
  LogisticModel model;
};

/// Iterative collective classification on a binary-labeled network.
/// Trains the base model on the labeled nodes (relational features from
/// labeled neighbors only), bootstrap-predicts every unlabeled node, then
/// sweeps seeded random orderings of the unlabeled nodes re-predicting
/// from current assignments until labels stabilize or the iteration cap.
/// Labeled nodes always keep their given labels. `latent` adds one row of
/// extra features per node (the structure features of PICA / TrICA).
IcaResult run_ica(const Network& network, const LabeledSplit& split,
                  const std::optional<Eigen::MatrixXd>& latent,
                  const IcaConfig& config, const TrainConfig& train = {});

struct PipelineConfig {
  AffinityConfig affinity;
  FitConfig fit;
  bool k_auto = false;
  int k_max = 60;
  IcaConfig ica;
  TrainConfig train;
};

struct PipelineInfo {
  int k_used = 0;
  std::vector<double> objective_history;
  bool fit_converged = false;
  int objective_increases = 0;
  KSelection selection;  // populated when k was selected automatically
};

/// Full transfer pipeline: propagation matrices for both networks, joint
/// factorization around the shared core (k selected automatically when
/// configured), then collective classification with the rows of F_t as
/// extra node features.
IcaResult tr_ica(const Network& source, const Network& target,
                 const LabeledSplit& split, const PipelineConfig& config,
                 PipelineInfo* info = nullptr);

}  // namespace trica
