#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "trica/graph.hpp"

namespace trica {

/// Which multiplicative update rules drive the joint factorization.
/// `as_printed` divides the factor updates by F F^T (numerator) terms;
/// `standard_tri_nmf` uses the Lee-Seung style denominators
/// F A R^T R A^T (resp. R A^T F^T F A), which make the objective
/// non-increasing per sweep.
enum class RuleSet { as_printed, standard_tri_nmf };

enum class Factor { Fs, Rs, Ft, Rt };

struct FitConfig {
  int k = 2;
  double beta = 1.0;
  int max_sweeps = 200;
  double rel_tol = 1e-8;
  std::uint64_t seed = 0;
  RuleSet rules = RuleSet::as_printed;
  bool normalize_columns = false;
  double epsilon = 1e-12;  // denominator guard, in (0, 1e-6]
  // select_k grid: {2} plus multiples of k_step up to K_max.
  int k_step = 10;
  bool first_local_max = false;
};

/// Factors of the coupled approximation P_s ~ F_s A R_s^T,
/// P_t ~ F_t A R_t^T plus the per-sweep objective trace.
/// objective_history[0] is the value at initialization. The stored
/// factors are the best iterate encountered (the last one whenever the
/// sweeps were monotone); best_objective is their objective value.
struct FactorizationState {
  Eigen::MatrixXd Fs, Rs;  // M x k
  Eigen::MatrixXd Ft, Rt;  // N x k
  Eigen::MatrixXd A;       // k x k
  std::vector<double> objective_history;
  double best_objective = 0.0;
  int k = 0;
  double beta = 0.0;
  RuleSet rules = RuleSet::as_printed;
  std::uint64_t seed = 0;
  int sweeps = 0;
  bool converged = false;
  int objective_increases = 0;        // sweeps where J went up
  double max_relative_increase = 0.0;  // largest such rise, relative
};

/// J = |P_s - F_s A R_s^T|_F^2 + |P_t - F_t A R_t^T|_F^2 + beta |A|_F^2.
double objective(const FactorizationState& state, const Eigen::MatrixXd& Ps,
                 const Eigen::MatrixXd& Pt);

/// Multiplicative update of the shared core:
/// A <- A .* (Fs'Ps Rs + Ft'Pt Rt) ./ (Fs'Fs A Rs'Rs + Ft'Ft A Rt'Rt + beta A).
/// Denominators are guarded by +epsilon; nonnegative in, nonnegative out.
Eigen::MatrixXd updated_core(const FactorizationState& state,
                             const Eigen::MatrixXd& Ps,
                             const Eigen::MatrixXd& Pt, double epsilon = 1e-12);

/// Multiplicative update of one side factor under the chosen rule set.
Eigen::MatrixXd updated_factor(const FactorizationState& state, Factor which,
                               const Eigen::MatrixXd& Ps,
                               const Eigen::MatrixXd& Pt, RuleSet rules,
                               double epsilon = 1e-12);

/// Alternating minimization. Factors start uniform in (0, 1] per seed
/// (or from `init` when given); each sweep updates A, Fs, Rs, Ft, Rt in
/// that order and records J. Stops when the relative decrease of J falls
/// below rel_tol or max_sweeps is reached. Throws on NaN/Inf factors.
FactorizationState fit_joint(const Eigen::MatrixXd& Ps,
                             const Eigen::MatrixXd& Pt, const FitConfig& config,
                             const std::optional<FactorizationState>& init = {});

/// Class-coherence score of F_t over the labeled nodes:
/// Q = sum_c (1/N_c) sum over ordered labeled pairs (i,j) of class c,
/// including i = j, of (F_t F_t^T)_ij. Classes with no labeled node are
/// skipped.
double quality_score(const Eigen::MatrixXd& Ft, const LabeledSplit& split,
                     const std::vector<int>& labels);

struct KSelection {
  int best_k = 0;
  std::vector<int> grid;
  std::vector<double> scores;
};

/// Fits every k in the grid (seeded independently per k), scores the
/// fitted F_t, and returns the maximizer (or the first local maximum
/// when config.first_local_max is set).
KSelection select_k(const Eigen::MatrixXd& Ps, const Eigen::MatrixXd& Pt,
                    const LabeledSplit& split, const std::vector<int>& labels,
                    int k_max, const FitConfig& config);

/// Two-factor counterpart P ~ F R^T used by the PICA baseline, with the
/// standard multiplicative updates.
struct SingleFactorization {
  Eigen::MatrixXd F, R;
  std::vector<double> objective_history;
  int sweeps = 0;
  bool converged = false;
};

SingleFactorization fit_single(const Eigen::MatrixXd& P,
                               const FitConfig& config,
                               const std::optional<Eigen::MatrixXd>& F0 = {},
                               const std::optional<Eigen::MatrixXd>& R0 = {});

KSelection select_k_single(const Eigen::MatrixXd& P, const LabeledSplit& split,
                           const std::vector<int>& labels, int k_max,
                           const FitConfig& config);

}  // namespace trica
