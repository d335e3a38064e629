#include "trica/factorization.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "trica/rng.hpp"

namespace trica {

namespace {

void validate(const FitConfig& config) {
  if (config.k < 2) throw std::invalid_argument("k must be at least 2");
  if (config.beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (!(config.epsilon > 0.0 && config.epsilon <= 1e-6))
    throw std::invalid_argument("epsilon must be in (0, 1e-6]");
  if (!(config.rel_tol > 0.0))
    throw std::invalid_argument("rel_tol must be positive");
  if (config.max_sweeps < 1)
    throw std::invalid_argument("max_sweeps must be >= 1");
}

Eigen::MatrixXd random_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform_open01();
  return m;
}

// Column rescale to unit sum; zero columns are left alone.
void normalize_columns(Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double s = m.col(j).sum();
    if (s > 0.0) m.col(j) /= s;
  }
}

void check_finite(const Eigen::MatrixXd& m, const char* name, int sweep) {
  if (!m.allFinite())
    throw std::runtime_error(std::string("non-finite values in ") + name +
                             " at sweep " + std::to_string(sweep));
}

std::vector<int> k_grid(int k_max, int step) {
  std::vector<int> grid{2};
  if (step < 1) step = 1;
  for (int k = step; k <= k_max; k += step)
    if (k > 2) grid.push_back(k);
  return grid;
}

int pick_k(const std::vector<int>& grid, const std::vector<double>& scores,
           bool first_local_max) {
  if (first_local_max) {
    for (std::size_t i = 0; i < scores.size(); ++i) {
      bool rises = i == 0 || scores[i] > scores[i - 1];
      bool falls = i + 1 == scores.size() || scores[i] >= scores[i + 1];
      if (rises && falls) return grid[i];
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return grid[best];
}

}  // namespace

double objective(const FactorizationState& state, const Eigen::MatrixXd& Ps,
                 const Eigen::MatrixXd& Pt) {
  if (Ps.rows() != state.Fs.rows() || Pt.rows() != state.Ft.rows() ||
      Ps.rows() != Ps.cols() || Pt.rows() != Pt.cols())
    throw std::invalid_argument("objective: dimension mismatch");
  double js = (Ps - state.Fs * state.A * state.Rs.transpose()).squaredNorm();
  double jt = (Pt - state.Ft * state.A * state.Rt.transpose()).squaredNorm();
  return js + jt + state.beta * state.A.squaredNorm();
}

Eigen::MatrixXd updated_core(const FactorizationState& state,
                             const Eigen::MatrixXd& Ps,
                             const Eigen::MatrixXd& Pt, double epsilon) {
  Eigen::MatrixXd numer = state.Fs.transpose() * Ps * state.Rs +
                          state.Ft.transpose() * Pt * state.Rt;
  Eigen::MatrixXd denom =
      (state.Fs.transpose() * state.Fs) * state.A *
          (state.Rs.transpose() * state.Rs) +
      (state.Ft.transpose() * state.Ft) * state.A *
          (state.Rt.transpose() * state.Rt) +
      state.beta * state.A;
  return state.A.cwiseProduct(
      numer.cwiseQuotient((denom.array() + epsilon).matrix()));
}

Eigen::MatrixXd updated_factor(const FactorizationState& state, Factor which,
                               const Eigen::MatrixXd& Ps,
                               const Eigen::MatrixXd& Pt, RuleSet rules,
                               double epsilon) {
  const Eigen::MatrixXd& A = state.A;
  const bool printed = rules == RuleSet::as_printed;
  Eigen::MatrixXd numer, denom;
  switch (which) {
    case Factor::Fs:
      numer = Ps * state.Rs * A.transpose();
      denom = printed ? Eigen::MatrixXd(state.Fs * state.Fs.transpose() * numer)
                      : Eigen::MatrixXd(state.Fs * A *
                                        (state.Rs.transpose() * state.Rs) *
                                        A.transpose());
      return state.Fs.cwiseProduct(
          numer.cwiseQuotient((denom.array() + epsilon).matrix()));
    case Factor::Rs:
      numer = Ps.transpose() * state.Fs * A;
      denom = printed ? Eigen::MatrixXd(state.Rs * state.Rs.transpose() * numer)
                      : Eigen::MatrixXd(state.Rs * A.transpose() *
                                        (state.Fs.transpose() * state.Fs) * A);
      return state.Rs.cwiseProduct(
          numer.cwiseQuotient((denom.array() + epsilon).matrix()));
    case Factor::Ft:
      numer = Pt * state.Rt * A.transpose();
      denom = printed ? Eigen::MatrixXd(state.Ft * state.Ft.transpose() * numer)
                      : Eigen::MatrixXd(state.Ft * A *
                                        (state.Rt.transpose() * state.Rt) *
                                        A.transpose());
      return state.Ft.cwiseProduct(
          numer.cwiseQuotient((denom.array() + epsilon).matrix()));
    case Factor::Rt:
      numer = Pt.transpose() * state.Ft * A;
      denom = printed ? Eigen::MatrixXd(state.Rt * state.Rt.transpose() * numer)
                      : Eigen::MatrixXd(state.Rt * A.transpose() *
                                        (state.Ft.transpose() * state.Ft) * A);
      return state.Rt.cwiseProduct(
          numer.cwiseQuotient((denom.array() + epsilon).matrix()));
  }
  throw std::logic_error("unreachable");
}

FactorizationState fit_joint(const Eigen::MatrixXd& Ps,
                             const Eigen::MatrixXd& Pt, const FitConfig& config,
                             const std::optional<FactorizationState>& init) {
  validate(config);
  if (Ps.rows() != Ps.cols() || Pt.rows() != Pt.cols())
    throw std::invalid_argument("propagation matrices must be square");
  if (Ps.minCoeff() < 0.0 || Pt.minCoeff() < 0.0)
    throw std::invalid_argument("propagation matrices must be nonnegative");

  const Eigen::Index m = Ps.rows(), n = Pt.rows(), k = config.k;

  FactorizationState state;
  state.k = config.k;
  state.beta = config.beta;
  state.rules = config.rules;
  state.seed = config.seed;
  if (init) {
    state.Fs = init->Fs;
    state.Rs = init->Rs;
    state.Ft = init->Ft;
    state.Rt = init->Rt;
    state.A = init->A;
    if (state.Fs.rows() != m || state.Rs.rows() != m || state.Ft.rows() != n ||
        state.Rt.rows() != n || state.A.rows() != k || state.A.cols() != k ||
        state.Fs.cols() != k || state.Rs.cols() != k || state.Ft.cols() != k ||
        state.Rt.cols() != k)
      throw std::invalid_argument("init factors have wrong shape");
  } else {
    Rng rng(config.seed);
    state.Fs = random_uniform(m, k, rng);
    state.Rs = random_uniform(m, k, rng);
    state.Ft = random_uniform(n, k, rng);
    state.Rt = random_uniform(n, k, rng);
    state.A = random_uniform(k, k, rng);
  }

  double j = objective(state, Ps, Pt);
  state.objective_history.push_back(j);
  state.best_objective = j;

  // The printed rules can oscillate (they are stationary only at
  // orthogonal-like factors), so the best iterate seen is what the fit
  // returns; for the monotone rule set this is simply the last sweep.
  FactorizationState best = state;
  double best_j = j;

  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    state.A = updated_core(state, Ps, Pt, config.epsilon);
    check_finite(state.A, "A", sweep);
    for (Factor f : {Factor::Fs, Factor::Rs, Factor::Ft, Factor::Rt}) {
      Eigen::MatrixXd updated =
          updated_factor(state, f, Ps, Pt, config.rules, config.epsilon);
      if (config.normalize_columns) normalize_columns(updated);
      switch (f) {
        case Factor::Fs: state.Fs = std::move(updated); break;
        case Factor::Rs: state.Rs = std::move(updated); break;
        case Factor::Ft: state.Ft = std::move(updated); break;
        case Factor::Rt: state.Rt = std::move(updated); break;
      }
    }
    check_finite(state.Fs, "Fs", sweep);
    check_finite(state.Rs, "Rs", sweep);
    check_finite(state.Ft, "Ft", sweep);
    check_finite(state.Rt, "Rt", sweep);

    double j_prev = j;
    j = objective(state, Ps, Pt);
    state.objective_history.push_back(j);
    state.sweeps = sweep;

    if (j > j_prev && j_prev > 0.0) {
      ++state.objective_increases;
      state.max_relative_increase =
          std::max(state.max_relative_increase, (j - j_prev) / j_prev);
    }
    if (j < best_j) {
      best_j = j;
      best.Fs = state.Fs;
      best.Rs = state.Rs;
      best.Ft = state.Ft;
      best.Rt = state.Rt;
      best.A = state.A;
    }
    // Convergence is judged on the magnitude of the relative change so
    // that a non-monotone sweep under the printed rules does not end the
    // fit; increases are tallied above instead.
    if (j_prev <= 1e-300 || std::abs(j_prev - j) / j_prev < config.rel_tol) {
      state.converged = true;
      break;
    }
  }

  state.Fs = std::move(best.Fs);
  state.Rs = std::move(best.Rs);
  state.Ft = std::move(best.Ft);
  state.Rt = std::move(best.Rt);
  state.A = std::move(best.A);
  state.best_objective = best_j;
  return state;
}

double quality_score(const Eigen::MatrixXd& Ft, const LabeledSplit& split,
                     const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(Ft.rows()))
    throw std::invalid_argument("labels must cover all F_t rows");
  int classes = 0;
  for (int i : split.labeled) classes = std::max(classes, labels.at(i) + 1);

  // sum over ordered pairs (i,j) in class c of (Ft Ft^T)_ij equals
  // |sum of class-c rows|^2, so the score needs one pass per class.
  double q = 0.0;
  for (int c = 0; c < classes; ++c) {
    Eigen::RowVectorXd s = Eigen::RowVectorXd::Zero(Ft.cols());
    int count = 0;
    for (int i : split.labeled) {
      if (labels[i] == c) {
        s += Ft.row(i);
        ++count;
      }
    }
    if (count == 0) continue;
    q += s.squaredNorm() / count;
  }
  return q;
}

KSelection select_k(const Eigen::MatrixXd& Ps, const Eigen::MatrixXd& Pt,
                    const LabeledSplit& split, const std::vector<int>& labels,
                    int k_max, const FitConfig& config) {
  if (k_max < 2) throw std::invalid_argument("K_max must be at least 2");
  KSelection sel;
  sel.grid = k_grid(k_max, config.k_step);
  for (int k : sel.grid) {
    FitConfig c = config;
    c.k = k;
    c.seed = mix_seed(config.seed, static_cast<std::uint64_t>(k));
    FactorizationState state = fit_joint(Ps, Pt, c);
    sel.scores.push_back(quality_score(state.Ft, split, labels));
  }
  sel.best_k = pick_k(sel.grid, sel.scores, config.first_local_max);
  return sel;
}

SingleFactorization fit_single(const Eigen::MatrixXd& P,
                               const FitConfig& config,
                               const std::optional<Eigen::MatrixXd>& F0,
                               const std::optional<Eigen::MatrixXd>& R0) {
  validate(config);
  if (P.rows() != P.cols())
    throw std::invalid_argument("propagation matrix must be square");
  if (P.minCoeff() < 0.0)
    throw std::invalid_argument("propagation matrix must be nonnegative");

  const Eigen::Index n = P.rows(), k = config.k;
  Rng rng(config.seed);
  SingleFactorization out;
  out.F = F0 ? *F0 : random_uniform(n, k, rng);
  out.R = R0 ? *R0 : random_uniform(n, k, rng);
  if (out.F.rows() != n || out.R.rows() != n || out.F.cols() != k ||
      out.R.cols() != k)
    throw std::invalid_argument("init factors have wrong shape");

  double j = (P - out.F * out.R.transpose()).squaredNorm();
  out.objective_history.push_back(j);
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    Eigen::MatrixXd fn = P * out.R;
    Eigen::MatrixXd fd = out.F * (out.R.transpose() * out.R);
    out.F = out.F.cwiseProduct(
        fn.cwiseQuotient((fd.array() + config.epsilon).matrix()));
    Eigen::MatrixXd rn = P.transpose() * out.F;
    Eigen::MatrixXd rd = out.R * (out.F.transpose() * out.F);
    out.R = out.R.cwiseProduct(
        rn.cwiseQuotient((rd.array() + config.epsilon).matrix()));
    check_finite(out.F, "F", sweep);
    check_finite(out.R, "R", sweep);

    double j_prev = j;
    j = (P - out.F * out.R.transpose()).squaredNorm();
    out.objective_history.push_back(j);
    out.sweeps = sweep;
    if (j_prev <= 1e-300 || std::abs(j_prev - j) / j_prev < config.rel_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

KSelection select_k_single(const Eigen::MatrixXd& P, const LabeledSplit& split,
                           const std::vector<int>& labels, int k_max,
                           const FitConfig& config) {
  if (k_max < 2) throw std::invalid_argument("K_max must be at least 2");
  KSelection sel;
  sel.grid = k_grid(k_max, config.k_step);
  for (int k : sel.grid) {
    FitConfig c = config;
    c.k = k;
    c.seed = mix_seed(config.seed, static_cast<std::uint64_t>(k));
    SingleFactorization fit = fit_single(P, c);
    sel.scores.push_back(quality_score(fit.F, split, labels));
  }
  sel.best_k = pick_k(sel.grid, sel.scores, config.first_local_max);
  return sel;
}

}  // namespace trica
