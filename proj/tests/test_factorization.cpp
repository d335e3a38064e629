#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "support/fixtures.hpp"
#include "trica/factorization.hpp"
#include "trica/io.hpp"
#include "trica/rng.hpp"

using namespace trica;
using trica::testing::group_indicator_factor;
using trica::testing::group_of_rows;
using trica::testing::planted_joint_pair;

namespace {

// 1x1 state for the scalar examples.
FactorizationState scalar_state(double fs, double rs, double ft, double rt,
                                double a, double beta) {
  FactorizationState s;
  s.Fs = Eigen::MatrixXd::Constant(1, 1, fs);
  s.Rs = Eigen::MatrixXd::Constant(1, 1, rs);
  s.Ft = Eigen::MatrixXd::Constant(1, 1, ft);
  s.Rt = Eigen::MatrixXd::Constant(1, 1, rt);
  s.A = Eigen::MatrixXd::Constant(1, 1, a);
  s.k = 1;
  s.beta = beta;
  return s;
}

Eigen::MatrixXd scalar(double v) {
  return Eigen::MatrixXd::Constant(1, 1, v);
}

Eigen::MatrixXd random_nonneg(int r, int c, Rng& rng) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform_open01();
  return m;
}

}  // namespace

TEST_CASE("objective closed forms") {
  // exact factors, beta = 0
  FactorizationState exact = scalar_state(1, 1, 1, 1, 2, 0.0);
  CHECK(objective(exact, scalar(2), scalar(2)) == 0.0);

  // A = 0 leaves the squared norms of the inputs
  FactorizationState zero = scalar_state(1, 1, 1, 1, 0, 0.0);
  CHECK(objective(zero, scalar(3), scalar(4)) == 25.0);

  // P_s=2, P_t=1, everything 1, beta=1: (2-1)^2 + 0 + 1 = 2
  FactorizationState ones = scalar_state(1, 1, 1, 1, 1, 1.0);
  CHECK(objective(ones, scalar(2), scalar(1)) == 2.0);

  CHECK_THROWS_AS(objective(ones, scalar(1), Eigen::MatrixXd::Zero(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("core update scalar arithmetic") {
  // numerator equals denominator at the all-ones fixed point
  FactorizationState fixed = scalar_state(1, 1, 1, 1, 1, 0.0);
  CHECK(updated_core(fixed, scalar(1), scalar(1))(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-9));

  // (2+2)/(1+1) = 2
  CHECK(updated_core(fixed, scalar(2), scalar(2))(0, 0) ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("factor update scalar arithmetic for both rule sets") {
  FactorizationState fixed = scalar_state(1, 1, 1, 1, 1, 0.0);
  for (RuleSet rules : {RuleSet::as_printed, RuleSet::standard_tri_nmf}) {
    CHECK(updated_factor(fixed, Factor::Fs, scalar(1), scalar(1), rules)(0, 0) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  // P_s=2: printed denominator carries the numerator, so F stays 1;
  // the standard denominator is F A R'R A' = 1, so F doubles.
  CHECK(updated_factor(fixed, Factor::Fs, scalar(2), scalar(1),
                       RuleSet::as_printed)(0, 0) ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(updated_factor(fixed, Factor::Fs, scalar(2), scalar(1),
                       RuleSet::standard_tri_nmf)(0, 0) ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("every update preserves nonnegativity on random states") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    int m = 2 + int(rng.below(5));
    int n = 2 + int(rng.below(5));
    int k = 2 + int(rng.below(3));
    FactorizationState s;
    s.Fs = random_nonneg(m, k, rng);
    s.Rs = random_nonneg(m, k, rng);
    s.Ft = random_nonneg(n, k, rng);
    s.Rt = random_nonneg(n, k, rng);
    s.A = random_nonneg(k, k, rng);
    // sprinkle exact zeros
    s.Fs(0, 0) = 0.0;
    s.A(k - 1, 0) = 0.0;
    s.beta = trial % 2 == 0 ? 0.0 : 0.7;
    Eigen::MatrixXd ps = random_nonneg(m, m, rng);
    Eigen::MatrixXd pt = random_nonneg(n, n, rng);

    REQUIRE(updated_core(s, ps, pt).minCoeff() >= 0.0);
    RuleSet rules =
        trial % 2 == 0 ? RuleSet::as_printed : RuleSet::standard_tri_nmf;
    for (Factor f : {Factor::Fs, Factor::Rs, Factor::Ft, Factor::Rt})
      REQUIRE(updated_factor(s, f, ps, pt, rules).minCoeff() >= 0.0);
  }
}

TEST_CASE("stationary states stay put under the core update") {
  // All-ones factors with P = F A R^T satisfy the optimality condition;
  // the update must not move A beyond the epsilon guard.
  const int m = 6, n = 5, k = 3;
  FactorizationState s;
  s.Fs = Eigen::MatrixXd::Ones(m, k);
  s.Rs = Eigen::MatrixXd::Ones(m, k);
  s.Ft = Eigen::MatrixXd::Ones(n, k);
  s.Rt = Eigen::MatrixXd::Ones(n, k);
  s.A = Eigen::MatrixXd::Ones(k, k);
  s.beta = 0.0;
  Eigen::MatrixXd ps = s.Fs * s.A * s.Rs.transpose();
  Eigen::MatrixXd pt = s.Ft * s.A * s.Rt.transpose();
  CHECK((updated_core(s, ps, pt) - s.A).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("exact orthonormal factors are a fixed point of full sweeps") {
  const int m = 12, n = 9, k = 3;
  FactorizationState init;
  init.Fs = group_indicator_factor(m, k);
  init.Rs = group_indicator_factor(m, k);
  init.Ft = group_indicator_factor(n, k);
  init.Rt = group_indicator_factor(n, k);
  Rng rng(5);
  init.A = random_nonneg(k, k, rng);
  Eigen::MatrixXd ps = init.Fs * init.A * init.Rs.transpose();
  Eigen::MatrixXd pt = init.Ft * init.A * init.Rt.transpose();

  for (RuleSet rules : {RuleSet::as_printed, RuleSet::standard_tri_nmf}) {
    FitConfig cfg;
    cfg.k = k;
    cfg.beta = 0.0;
    cfg.max_sweeps = 30;
    cfg.rel_tol = 1e-300;  // run all sweeps
    cfg.rules = rules;
    FactorizationState st = fit_joint(ps, pt, cfg, init);
    for (double j : st.objective_history)
      CHECK(j <= 1e-12 * (1.0 + ps.squaredNorm() + pt.squaredNorm()));
  }
}

TEST_CASE("random fits descend and stay nonnegative") {
  Rng rng(77);
  Eigen::MatrixXd ps = random_nonneg(20, 20, rng);
  Eigen::MatrixXd pt = random_nonneg(20, 20, rng);
  for (RuleSet rules : {RuleSet::as_printed, RuleSet::standard_tri_nmf}) {
    FitConfig cfg;
    cfg.k = 5;
    cfg.beta = 0.1;
    cfg.max_sweeps = 200;
    cfg.rel_tol = 1e-12;
    cfg.seed = 3;
    cfg.rules = rules;
    FactorizationState st = fit_joint(ps, pt, cfg);
    CHECK(st.best_objective < st.objective_history.front());
    CHECK(st.Fs.minCoeff() >= 0.0);
    CHECK(st.Rs.minCoeff() >= 0.0);
    CHECK(st.Ft.minCoeff() >= 0.0);
    CHECK(st.Rt.minCoeff() >= 0.0);
    CHECK(st.A.minCoeff() >= 0.0);
    CHECK(objective(st, ps, pt) == doctest::Approx(st.best_objective));
  }
}

TEST_CASE("standard rules are monotone per sweep at beta 0") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    Eigen::MatrixXd ps = random_nonneg(15, 15, rng);
    Eigen::MatrixXd pt = random_nonneg(15, 15, rng);
    FitConfig cfg;
    cfg.k = 5;
    cfg.beta = 0.0;
    cfg.max_sweeps = 80;
    cfg.rel_tol = 1e-14;
    cfg.seed = seed + 50;
    cfg.rules = RuleSet::standard_tri_nmf;
    FactorizationState st = fit_joint(ps, pt, cfg);
    const auto& h = st.objective_history;
    for (std::size_t i = 1; i < h.size(); ++i)
      CHECK(h[i] <= h[i - 1] * (1.0 + 1e-9));
    CHECK(st.objective_increases == 0);
  }
}

TEST_CASE("column normalization keeps unit column sums") {
  Rng rng(8);
  Eigen::MatrixXd ps = random_nonneg(10, 10, rng);
  Eigen::MatrixXd pt = random_nonneg(8, 8, rng);
  FitConfig cfg;
  cfg.k = 3;
  cfg.max_sweeps = 20;
  cfg.normalize_columns = true;
  cfg.seed = 4;
  FactorizationState st = fit_joint(ps, pt, cfg);
  for (int j = 0; j < 3; ++j) {
    CHECK(st.Fs.col(j).sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(st.Rt.col(j).sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("fit configuration is validated") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Ones(4, 4);
  FitConfig cfg;
  cfg.k = 1;
  CHECK_THROWS_AS(fit_joint(p, p, cfg), std::invalid_argument);
  cfg.k = 2;
  cfg.epsilon = 1e-3;
  CHECK_THROWS_AS(fit_joint(p, p, cfg), std::invalid_argument);
  cfg.epsilon = 1e-12;
  Eigen::MatrixXd neg = p;
  neg(0, 0) = -1.0;
  CHECK_THROWS_AS(fit_joint(neg, p, cfg), std::invalid_argument);
}

TEST_CASE("quality score closed forms") {
  // one-hot rows by class: Q equals the number of labeled nodes
  const int n = 9;
  Eigen::MatrixXd ft = Eigen::MatrixXd::Zero(n, 3);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    labels[i] = i % 3;
    ft(i, labels[i]) = 1.0;
  }
  LabeledSplit split;
  for (int i = 0; i < n; ++i)
    (i < 6 ? split.labeled : split.unlabeled).push_back(i);
  CHECK(quality_score(ft, split, labels) == 6.0);

  // two same-class nodes with orthonormal rows -> (1+0+0+1)/2 = 1
  Eigen::MatrixXd ortho(2, 2);
  ortho << 1, 0, 0, 1;
  LabeledSplit both;
  both.labeled = {0, 1};
  CHECK(quality_score(ortho, both, {0, 0}) == 1.0);

  // one labeled node with a unit row -> 1
  LabeledSplit one;
  one.labeled = {0};
  one.unlabeled = {1};
  CHECK(quality_score(ortho, one, {0, 0}) == 1.0);
}

TEST_CASE("quality score ignores unseen classes and label order") {
  Eigen::MatrixXd ft(4, 2);
  ft << 1, 0, 0.5, 0.5, 0, 1, 0.2, 0.8;
  // class 1 has no labeled node and is skipped
  std::vector<int> labels = {0, 0, 2, 1};
  LabeledSplit split;
  split.labeled = {0, 1, 2};
  double q = quality_score(ft, split, labels);

  LabeledSplit permuted = split;
  permuted.labeled = {2, 0, 1};
  CHECK(quality_score(ft, permuted, labels) == doctest::Approx(q));
}

TEST_CASE("select_k with a single candidate returns it") {
  auto pair = planted_joint_pair(12, 12, 3, 0.0, 1);
  LabeledSplit split;
  for (int i = 0; i < 12; ++i)
    (i % 2 == 0 ? split.labeled : split.unlabeled).push_back(i);
  FitConfig cfg;
  cfg.max_sweeps = 50;
  cfg.k_step = 100;  // grid collapses to {2}
  KSelection sel = select_k(pair.ps, pair.pt, split, pair.target_groups, 2, cfg);
  CHECK(sel.grid == std::vector<int>{2});
  CHECK(sel.best_k == 2);
  CHECK_THROWS_AS(select_k(pair.ps, pair.pt, split, pair.target_groups, 1, cfg),
                  std::invalid_argument);
}

TEST_CASE("select_k is deterministic and recovers the planted rank") {
  auto pair = planted_joint_pair(32, 28, 4, 0.04, 3);
  LabeledSplit split;
  for (int i = 0; i < 28; ++i)
    (i % 2 == 0 ? split.labeled : split.unlabeled).push_back(i);
  FitConfig cfg;
  cfg.beta = 1.0;
  cfg.max_sweeps = 800;
  cfg.rel_tol = 1e-10;
  cfg.seed = 3;
  cfg.k_step = 1;
  cfg.rules = RuleSet::standard_tri_nmf;
  cfg.first_local_max = true;
  KSelection a = select_k(pair.ps, pair.pt, split, pair.target_groups, 8, cfg);
  KSelection b = select_k(pair.ps, pair.pt, split, pair.target_groups, 8, cfg);
  CHECK(a.scores == b.scores);
  CHECK(a.best_k == b.best_k);
  CHECK(a.best_k >= 3);
  CHECK(a.best_k <= 5);
}

TEST_CASE("two-factor fit keeps an identity-compatible start at identity") {
  const int n = 12;
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
  FitConfig cfg;
  cfg.k = n;
  cfg.max_sweeps = 100;
  cfg.rel_tol = 1e-14;
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  SingleFactorization fit = fit_single(p, cfg, eye, eye);
  CHECK((p - fit.F * fit.R.transpose()).norm() <= 1e-6);
  CHECK(fit.F.minCoeff() >= 0.0);
  CHECK(fit.R.minCoeff() >= 0.0);
}

TEST_CASE("two-factor fit recovers a planted rank-3 matrix") {
  Eigen::MatrixXd f = group_indicator_factor(18, 3);
  Eigen::MatrixXd r = group_indicator_factor(18, 3);
  Rng rng(12);
  Eigen::MatrixXd mid = random_nonneg(3, 3, rng);
  mid.diagonal().array() += 1.5;
  Eigen::MatrixXd p = f * mid * r.transpose();
  FitConfig cfg;
  cfg.k = 3;
  cfg.max_sweeps = 3000;
  cfg.rel_tol = 1e-13;
  cfg.seed = 2;
  SingleFactorization fit = fit_single(p, cfg);
  double rel = (p - fit.F * fit.R.transpose()).norm() / p.norm();
  CHECK(rel <= 0.05);
  // Monotone until the residual reaches the floating-point floor, where
  // the squared norm is pure cancellation noise.
  const auto& h = fit.objective_history;
  const double floor = 1e-15 * p.squaredNorm();
  for (std::size_t i = 1; i < h.size() && h[i - 1] > floor; ++i)
    CHECK(h[i] <= h[i - 1] * (1.0 + 1e-9));
}

TEST_CASE("matrix and factorization files round-trip") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "trica_fact_tests";
  fs::create_directories(dir);

  Rng rng(9);
  Eigen::MatrixXd m = random_nonneg(7, 5, rng);
  for (bool binary : {true, false}) {
    fs::path p = dir / (binary ? "m.bin" : "m.txt");
    write_matrix(p.string(), m, binary, {{"alpha", "0.5"}});
    std::map<std::string, std::string> meta;
    Eigen::MatrixXd back = read_matrix(p.string(), &meta);
    CHECK(back == m);
    CHECK(meta.at("alpha") == "0.5");
  }

  Eigen::MatrixXd ps = random_nonneg(6, 6, rng);
  Eigen::MatrixXd pt = random_nonneg(5, 5, rng);
  FitConfig cfg;
  cfg.k = 2;
  cfg.max_sweeps = 10;
  cfg.seed = 11;
  FactorizationState st = fit_joint(ps, pt, cfg);
  fs::path p = dir / "state.fact";
  write_factorization(p.string(), st);
  FactorizationState back = read_factorization(p.string());
  CHECK(back.k == st.k);
  CHECK(back.beta == st.beta);
  CHECK(back.seed == st.seed);
  CHECK(back.objective_history == st.objective_history);
  CHECK(back.best_objective == st.best_objective);
  CHECK(back.Fs == st.Fs);
  CHECK(back.Rt == st.Rt);
  CHECK(back.A == st.A);
}
