#include "trica/propagation.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace trica {

Eigen::MatrixXd affinity_matrix(const Network& network,
                                const AffinityConfig& config) {
  if (!(config.alpha >= 0.0 && config.alpha < 1.0))
    throw std::invalid_argument("alpha must be in [0, 1)");
  const int n = network.node_count();
  const bool gaussian = config.kernel == AffinityKernel::gaussian;
  if (gaussian) {
    if (!(config.sigma > 0.0))
      throw std::invalid_argument("sigma must be positive");
    if (network.feature_dim() == 0)
      throw std::invalid_argument("gaussian kernel requires node features");
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  const double denom = 2.0 * config.sigma * config.sigma;
  for (int i = 0; i < n; ++i) {
    for (int j : network.neighbors(i)) {
      if (j <= i) continue;
      double value = 1.0;
      if (gaussian) {
        double dist2 =
            (network.features().row(i) - network.features().row(j))
                .squaredNorm();
        double d = config.squared_norm ? dist2 : std::sqrt(dist2);
        value = std::exp(-d / denom);
      }
      w(i, j) = value;
      w(j, i) = value;
    }
  }
  return w;
}

Eigen::MatrixXd normalized_operator(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols())
    throw std::invalid_argument("affinity matrix must be square");
  const int n = static_cast<int>(w.rows());
  if (w.minCoeff() < 0.0)
    throw std::invalid_argument("affinity matrix has negative entries");
  for (int i = 0; i < n; ++i)
    if (w(i, i) != 0.0)
      throw std::invalid_argument("affinity diagonal must be zero");

  // D^{-1/2} with the zero-degree convention: isolated nodes neither send
  // nor receive, so their scaling factor is zero.
  Eigen::VectorXd dinv_sqrt(n);
  for (int i = 0; i < n; ++i) {
    double deg = w.row(i).sum();
    dinv_sqrt(i) = deg > 0.0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  return dinv_sqrt.asDiagonal() * w * dinv_sqrt.asDiagonal();
}

PropagateResult propagate_labels(const Eigen::MatrixXd& l,
                                 const Eigen::MatrixXd& y0, double alpha,
                                 double tol, int max_iter) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must be in [0, 1)");
  if (l.rows() != l.cols() || l.rows() != y0.rows())
    throw std::invalid_argument("dimension mismatch");

  PropagateResult result;
  result.y = y0;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::MatrixXd next = alpha * (l * result.y) + (1.0 - alpha) * y0;
    double change = (next - result.y).cwiseAbs().maxCoeff();
    result.y = std::move(next);
    result.iterations = it;
    if (change < tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

PropagationMatrix propagation_matrix(const Eigen::MatrixXd& l, double alpha,
                                     SolveMode mode, int neumann_order,
                                     int dense_limit) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("alpha must be in [0, 1)");
  if (l.rows() != l.cols())
    throw std::invalid_argument("operator must be square");
  const int n = static_cast<int>(l.rows());

  bool use_neumann = mode == SolveMode::neumann ||
                     (mode == SolveMode::automatic && n > dense_limit);

  PropagationMatrix pm;
  pm.alpha = alpha;
  if (use_neumann) {
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    Eigen::MatrixXd al = alpha * l;
    for (int i = 1; i <= neumann_order; ++i) {
      term = al * term;
      sum += term;
    }
    pm.p = std::move(sum);
    return pm;
  }

  // I - alpha L is symmetric positive definite for alpha < 1 since the
  // eigenvalues of L lie in [-1, 1].
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n) - alpha * l;
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  if (llt.info() != Eigen::Success) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(q);
    Eigen::MatrixXd p = lu.solve(Eigen::MatrixXd::Identity(n, n));
    if (!p.allFinite())
      throw std::runtime_error("propagation solve failed (singular system)");
    pm.p = std::move(p);
    return pm;
  }
  pm.p = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return pm;
}

PropagationMatrix build_propagation_matrix(const Network& network,
                                           const AffinityConfig& config) {
  Eigen::MatrixXd w = affinity_matrix(network, config);
  Eigen::MatrixXd l = normalized_operator(w);
  PropagationMatrix pm = propagation_matrix(
      l, config.alpha, config.solve, config.neumann_order, config.dense_limit);
  pm.source_network = &network;
  return pm;
}

Eigen::MatrixXd label_indicator(const Network& network,
                                const LabeledSplit& split) {
  Eigen::MatrixXd y0 =
      Eigen::MatrixXd::Zero(network.node_count(), network.class_count());
  for (int i : split.labeled) {
    int c = network.label(i);
    if (c >= 0) y0(i, c) = 1.0;
  }
  return y0;
}

}  // namespace trica
