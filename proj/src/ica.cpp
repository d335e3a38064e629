#include "trica/ica.hpp"

#include <algorithm>
#include <stdexcept>

#include "trica/rng.hpp"

namespace trica {

namespace {

Eigen::VectorXd assemble(const Network& network, int node,
                         const std::optional<Eigen::MatrixXd>& latent,
                         const Eigen::VectorXd& relational) {
  const int d = network.feature_dim();
  const int k = latent ? static_cast<int>(latent->cols()) : 0;
  Eigen::VectorXd v(d + k + relational.size());
  v.head(d) = network.features().row(node);
  if (latent) v.segment(d, k) = latent->row(node);
  v.tail(relational.size()) = relational;
  return v;
}

int default_positive(const Network& network, const LabeledSplit& split) {
  std::vector<int> counts(network.class_count(), 0);
  for (int i : split.labeled) ++counts[network.label(i)];
  int best = 0;
  for (int c = 1; c < network.class_count(); ++c)
    if (counts[c] > counts[best]) best = c;
  return best;
}

}  // namespace

Eigen::VectorXd relational_features(const Network& network,
                                    const std::vector<int>& current, int node,
                                    Aggregation aggregation) {
  const int classes = network.class_count();
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(classes);
  int assigned = 0;
  for (int j : network.neighbors(node)) {
    int c = current[j];
    if (c < 0) continue;
    counts(c) += 1.0;
    ++assigned;
  }
  switch (aggregation) {
    case Aggregation::count:
      return counts;
    case Aggregation::proportion:
      return assigned > 0 ? Eigen::VectorXd(counts / assigned) : counts;
    case Aggregation::mode: {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(classes);
      if (assigned > 0) {
        int best = 0;
        for (int c = 1; c < classes; ++c)
          if (counts(c) > counts(best)) best = c;
        out(best) = 1.0;
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

IcaResult run_ica(const Network& network, const LabeledSplit& split,
                  const std::optional<Eigen::MatrixXd>& latent,
                  const IcaConfig& config, const TrainConfig& train) {
  if (network.class_count() != 2)
    throw std::invalid_argument("collective classification expects a "
                                "binary-labeled network");
  const int n = network.node_count();
  if (latent && latent->rows() != n)
    throw std::invalid_argument("latent feature rows must match node count");
  if (config.max_iterations < 1)
    throw std::invalid_argument("max_iterations must be >= 1");

  const int positive = config.positive_class >= 0
                           ? config.positive_class
                           : default_positive(network, split);

  std::optional<Eigen::MatrixXd> scaled_latent = latent;
  if (scaled_latent && config.scale_latent) {
    double latent_mean = scaled_latent->cwiseAbs().mean();
    if (latent_mean > 0.0) {
      double content_mean = network.features().size() > 0
                                ? network.features().cwiseAbs().mean()
                                : 0.0;
      *scaled_latent *= (content_mean > 0.0 ? content_mean : 1.0) / latent_mean;
    }
  }

  IcaResult result;
  std::vector<int> current(n, -1);
  for (int i : split.labeled) current[i] = network.label(i);

  result.labels = current;
  result.probability.assign(n, 0.0);
  for (int i : split.labeled)
    result.probability[i] = network.label(i) == positive ? 1.0 : 0.0;

  if (split.unlabeled.empty()) {
    result.stabilized = true;
    return result;
  }

  auto train_on_labeled = [&](const std::vector<int>& assignments) {
    Eigen::MatrixXd x(split.labeled.size(), 0);
    std::vector<int> y(split.labeled.size());
    for (std::size_t r = 0; r < split.labeled.size(); ++r) {
      int i = split.labeled[r];
      Eigen::VectorXd rel =
          relational_features(network, assignments, i, config.aggregation);
      Eigen::VectorXd v = assemble(network, i, scaled_latent, rel);
      if (x.cols() == 0) x.resize(split.labeled.size(), v.size());
      x.row(r) = v;
      y[r] = network.label(i) == positive ? 1 : 0;
    }
    return train_base(x, y, train.l2, train);
  };

  // Bootstrap: relational features see labeled neighbors only, both for
  // training rows and for the first prediction of every unlabeled node.
  result.model = train_on_labeled(current);

  std::vector<int> next = current;
  for (int i : split.unlabeled) {
    Eigen::VectorXd rel =
        relational_features(network, current, i, config.aggregation);
    Prediction p =
        predict(result.model, assemble(network, i, scaled_latent, rel));
    next[i] = p.label == 1 ? positive : 1 - positive;
    result.probability[i] = p.probability;
  }
  current = std::move(next);

  Rng rng(config.seed);
  std::vector<int> order = split.unlabeled;
  for (int pass = 1; pass <= config.max_iterations; ++pass) {
    if (config.retrain_each_pass) result.model = train_on_labeled(current);
    rng.shuffle(order);
    int changes = 0;
    for (int i : order) {
      Eigen::VectorXd rel =
          relational_features(network, current, i, config.aggregation);
      Prediction p =
          predict(result.model, assemble(network, i, scaled_latent, rel));
      int label = p.label == 1 ? positive : 1 - positive;
      if (label != current[i]) ++changes;
      current[i] = label;
      result.probability[i] = p.probability;
    }
    result.passes = pass;
    if (changes <= config.stability_threshold) {
      result.stabilized = true;
      break;
    }
  }

  result.labels = std::move(current);
  return result;
}

IcaResult tr_ica(const Network& source, const Network& target,
                 const LabeledSplit& split, const PipelineConfig& config,
                 PipelineInfo* info) {
  for (int i = 0; i < source.node_count(); ++i)
    if (!source.is_labeled(i))
      throw std::invalid_argument("source network must be fully labeled");

  PropagationMatrix ps = build_propagation_matrix(source, config.affinity);
  PropagationMatrix pt = build_propagation_matrix(target, config.affinity);

  FitConfig fit = config.fit;
  fit.k = std::max(2, fit.k);
  KSelection selection;
  if (config.k_auto) {
    selection =
        select_k(ps.p, pt.p, split, target.labels(), config.k_max, fit);
    fit.k = selection.best_k;
    fit.seed = mix_seed(config.fit.seed, static_cast<std::uint64_t>(fit.k));
  }
  FactorizationState state = fit_joint(ps.p, pt.p, fit);

  if (info) {
    info->k_used = fit.k;
    info->objective_history = state.objective_history;
    info->fit_converged = state.converged;
    info->objective_increases = state.objective_increases;
    info->selection = selection;
  }
  return run_ica(target, split, state.Ft, config.ica, config.train);
}

}  // namespace trica
