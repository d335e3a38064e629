#pragma once

#include <Eigen/Dense>
#include <vector>

namespace trica {

struct TrainConfig {
  double l2 = 1e-3;
  int max_iterations = 2000;
  double grad_tol = 1e-6;
};

/// Binary logistic model over an assembled feature vector plus bias.
struct LogisticModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  double l2 = 0.0;
  bool trained = false;
  // Set when the training set lacked one class; the model then predicts
  // a smoothed class prior for every input.
  bool constant_prior = false;
  int iterations = 0;
  bool converged = false;
  std::vector<double> loss_history;
};

struct Prediction {
  int label = 0;       // 1 = positive
  double probability = 0.5;  // of the positive class
};

/// Mean logistic loss with an L2 penalty on the weights (bias excluded):
/// (1/n) sum softplus-style cross entropy + (l2/2)|w|^2.
double logistic_loss(const Eigen::MatrixXd& x, const std::vector<int>& y,
                     double l2, const Eigen::VectorXd& w, double bias);

/// Analytic gradient of logistic_loss.
void logistic_gradient(const Eigen::MatrixXd& x, const std::vector<int>& y,
                       double l2, const Eigen::VectorXd& w, double bias,
                       Eigen::VectorXd& grad_w, double& grad_bias);

/// Batch gradient descent from zero weights. The step is chosen by
/// backtracking at the first iteration and halved again whenever a step
/// would raise the loss, so the recorded loss trace is non-increasing.
/// Stops at grad_tol on the gradient norm or the iteration cap.
LogisticModel train_base(const Eigen::MatrixXd& x, const std::vector<int>& y,
                         double l2, const TrainConfig& config = {});

/// probability = sigmoid(w.x + bias); label 1 iff probability >= 0.5.
Prediction predict(const LogisticModel& model, const Eigen::VectorXd& x);

}  // namespace trica
