#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "trica/graph.hpp"

namespace trica {

enum class AffinityKernel { binary, gaussian };

/// How (I - alpha L)^{-1} is formed: a dense direct solve, a truncated
/// Neumann series sum_{i<=order} (alpha L)^i, or automatic (direct up to
/// `dense_limit` nodes, series beyond).
enum class SolveMode { automatic, direct, neumann };

struct AffinityConfig {
  AffinityKernel kernel = AffinityKernel::binary;
  double sigma = 1.0;   // Gaussian width, feature-space units
  double alpha = 0.5;   // retention parameter, in [0, 1)
  // The Gaussian exponent divides the plain norm |xi - xj| by 2 sigma^2;
  // set squared_norm for the conventional |.|^2 form.
  bool squared_norm = false;
  SolveMode solve = SolveMode::automatic;
  int neumann_order = 30;
  int dense_limit = 4000;
};

/// Dense label propagation matrix P = (I - alpha L)^{-1} for one network.
struct PropagationMatrix {
  Eigen::MatrixXd p;
  double alpha = 0.0;
  const Network* source_network = nullptr;
};

/// Edge-restricted affinity matrix W: zero off-edges and on the diagonal,
/// 1 on edges (binary) or the Gaussian kernel value (gaussian). Symmetric.
Eigen::MatrixXd affinity_matrix(const Network& network,
                                const AffinityConfig& config);

/// L = D^{-1/2} W D^{-1/2} with D_ii = sum_j W_ij. Rows and columns of
/// zero-degree nodes stay zero. Requires W symmetric, nonnegative, with a
/// zero diagonal.
Eigen::MatrixXd normalized_operator(const Eigen::MatrixXd& w);

struct PropagateResult {
  Eigen::MatrixXd y;
  int iterations = 0;
  bool converged = false;
};

/// Iterates Y(t+1) = alpha L Y(t) + (1 - alpha) Y(0) until the largest
/// entry change drops below tol or max_iter is reached. The limit equals
/// (1 - alpha)(I - alpha L)^{-1} Y0.
PropagateResult propagate_labels(const Eigen::MatrixXd& l,
                                 const Eigen::MatrixXd& y0, double alpha,
                                 double tol = 1e-12, int max_iter = 10000);

/// P = (I - alpha L)^{-1}, nonnegative up to numerical slack.
PropagationMatrix propagation_matrix(const Eigen::MatrixXd& l, double alpha,
                                     SolveMode mode = SolveMode::automatic,
                                     int neumann_order = 30,
                                     int dense_limit = 4000);

/// Affinity -> normalized operator -> P for one network.
PropagationMatrix build_propagation_matrix(const Network& network,
                                           const AffinityConfig& config);

/// n x c indicator matrix: row i one-hot at the node's class for nodes in
/// the labeled set, zero otherwise.
Eigen::MatrixXd label_indicator(const Network& network,
                                const LabeledSplit& split);

}  // namespace trica
