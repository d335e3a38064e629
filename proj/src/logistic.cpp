#include "trica/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace trica {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) - y z, evaluated without overflow.
double cross_entropy(double z, int y) {
  double softplus = z > 0.0 ? z + std::log1p(std::exp(-z))
                            : std::log1p(std::exp(z));
  return softplus - y * z;
}

void check_inputs(const Eigen::MatrixXd& x, const std::vector<int>& y) {
  if (static_cast<Eigen::Index>(y.size()) != x.rows())
    throw std::invalid_argument("label count does not match feature rows");
  if (!x.allFinite()) throw std::invalid_argument("non-finite features");
}

}  // namespace

double logistic_loss(const Eigen::MatrixXd& x, const std::vector<int>& y,
                     double l2, const Eigen::VectorXd& w, double bias) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd z = x * w;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    loss += cross_entropy(z(i) + bias, y[i]);
  return loss / static_cast<double>(n) + 0.5 * l2 * w.squaredNorm();
}

void logistic_gradient(const Eigen::MatrixXd& x, const std::vector<int>& y,
                       double l2, const Eigen::VectorXd& w, double bias,
                       Eigen::VectorXd& grad_w, double& grad_bias) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd z = x * w;
  Eigen::VectorXd residual(n);
  for (Eigen::Index i = 0; i < n; ++i)
    residual(i) = sigmoid(z(i) + bias) - y[i];
  grad_w = x.transpose() * residual / static_cast<double>(n) + l2 * w;
  grad_bias = residual.mean();
}

LogisticModel train_base(const Eigen::MatrixXd& x, const std::vector<int>& y,
                         double l2, const TrainConfig& config) {
  check_inputs(x, y);
  LogisticModel model;
  model.l2 = l2;
  model.weights = Eigen::VectorXd::Zero(x.cols());

  long positives = 0;
  for (int v : y) positives += v ? 1 : 0;
  const long negatives = static_cast<long>(y.size()) - positives;
  if (positives == 0 || negatives == 0) {
    // Covers the empty training set too: smoothed log-odds of whatever
    // was observed, 0 when nothing was.
    model.bias = std::log((positives + 0.5) / (negatives + 0.5));
    model.constant_prior = true;
    model.trained = true;
    return model;
  }

  Eigen::VectorXd w = model.weights;
  double bias = 0.0;
  double loss = logistic_loss(x, y, l2, w, bias);
  model.loss_history.push_back(loss);

  Eigen::VectorXd grad_w;
  double grad_bias = 0.0;
  double step = 0.0;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    logistic_gradient(x, y, l2, w, bias, grad_w, grad_bias);
    double gnorm2 = grad_w.squaredNorm() + grad_bias * grad_bias;
    if (std::sqrt(gnorm2) < config.grad_tol) {
      model.converged = true;
      break;
    }

    if (iter == 1) {
      // Backtracking line search fixes the step size up front.
      step = 1.0;
      for (int h = 0; h < 60; ++h) {
        double trial = logistic_loss(x, y, l2, w - step * grad_w,
                                     bias - step * grad_bias);
        if (trial <= loss - 1e-4 * step * gnorm2) break;
        step *= 0.5;
      }
    }

    double next = logistic_loss(x, y, l2, w - step * grad_w,
                                bias - step * grad_bias);
    // Keep the loss trace monotone: shrink the step if it overshoots.
    int halvings = 0;
    while (next > loss && halvings < 60) {
      step *= 0.5;
      next = logistic_loss(x, y, l2, w - step * grad_w,
                           bias - step * grad_bias);
      ++halvings;
    }
    w -= step * grad_w;
    bias -= step * grad_bias;
    loss = next;
    model.loss_history.push_back(loss);
    model.iterations = iter;
  }

  if (!w.allFinite() || !std::isfinite(bias))
    throw std::runtime_error("logistic training produced non-finite weights");
  model.weights = std::move(w);
  model.bias = bias;
  model.trained = true;
  return model;
}

Prediction predict(const LogisticModel& model, const Eigen::VectorXd& x) {
  if (!model.trained) throw std::logic_error("model is not trained");
  if (x.size() != model.weights.size())
    throw std::invalid_argument("feature dimension mismatch");
  Prediction p;
  p.probability = sigmoid(model.weights.dot(x) + model.bias);
  p.label = p.probability >= 0.5 ? 1 : 0;
  return p;
}

}  // namespace trica
