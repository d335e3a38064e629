#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trica/ica.hpp"

namespace trica {

enum class Method { ICA, PICA, TrICA };

std::string method_name(Method m);

/// Sweep description. The default run varies the labeled fraction over
/// p_grid; when beta_grid or k_grid is set, that grid is swept instead
/// with the labeled fraction pinned at p_fixed.
struct ExperimentConfig {
  std::string source_path;
  std::string target_path;
  std::vector<Method> methods = {Method::ICA, Method::PICA, Method::TrICA};
  std::vector<double> p_grid = {0.02, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  int repeats = 3;
  std::uint64_t seed = 0;
  bool stratified = false;
  std::vector<double> beta_grid;
  std::vector<int> k_grid;
  double p_fixed = 0.5;
  PipelineConfig pipeline;
};

struct RunResult {
  std::string method;
  std::string source;
  std::string target;
  double p = 0.0;
  double beta = 0.0;
  int k = 0;  // k actually used; 0 for ICA
  int repeat_index = 0;
  std::uint64_t seed = 0;
  double accuracy = 0.0;  // on unlabeled nodes only
  bool converged = false;
  double wall_time_s = 0.0;
  bool failed = false;
  std::string error;
};

/// Fraction of eval_set where predicted matches truth. Throws on an
/// empty evaluation set.
double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& truth,
                const std::vector<int>& eval_set);

/// PICA structure features: the target's propagation matrix factorized
/// alone as P_t ~ F R^T (same k selection as the joint model); returns
/// the rows of F.
Eigen::MatrixXd pica_features(const Network& target, const LabeledSplit& split,
                              const PipelineConfig& config,
                              PipelineInfo* info = nullptr);

/// Dispatches one method on pre-binarized networks.
IcaResult run_method(Method method, const Network& source,
                     const Network& target, const LabeledSplit& split,
                     const PipelineConfig& config, PipelineInfo* info = nullptr);

/// Parses the line-oriented `key = value` experiment config format.
ExperimentConfig load_experiment_config(const std::string& path);

/// Runs every sweep cell: binarizes both networks around their largest
/// classes, draws one split per (sweep value, repeat) shared by all
/// methods, and records per-cell accuracy. A failing cell is recorded and
/// the sweep continues. Fully deterministic given the base seed.
std::vector<RunResult> run_experiment(const ExperimentConfig& config);

/// CSV rows `method,source,target,p,beta,k,repeat,seed,accuracy,converged,
/// wall_time_s` in sweep order, plus one mean row per (method, sweep value).
void write_results_csv(std::ostream& out, const std::vector<RunResult>& results);

bool any_failed(const std::vector<RunResult>& results);

}  // namespace trica
