#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "trica/experiment.hpp"
#include "trica/factorization.hpp"
#include "trica/graph.hpp"
#include "trica/ica.hpp"
#include "trica/io.hpp"
#include "trica/linqs.hpp"
#include "trica/propagation.hpp"
#include "trica/rng.hpp"

namespace {

using namespace trica;

struct IngestArgs {
  std::string content, cites, out;
};

int cmd_ingest(const IngestArgs& args) {
  LinqsReport report;
  Network net = load_linqs({args.content, args.cites}, &report);
  write_network(args.out, net);
  std::cout << "nodes " << net.node_count() << "\n"
            << "raw_link_lines " << report.raw_link_lines << "\n"
            << "edges " << report.deduplicated_edges << "\n"
            << "dropped_unknown_refs " << report.dropped_unknown_refs << "\n"
            << "dropped_self_links " << report.dropped_self_links << "\n"
            << "duplicate_links " << report.duplicate_links << "\n"
            << "classes " << net.class_count() << "\n"
            << "largest_class " << net.class_name(largest_class(net)) << "\n";
  return 0;
}

struct PropagateArgs {
  std::string network, out, kernel = "binary";
  double alpha = 0.5, sigma = 1.0;
  bool squared_norm = false, text = false;
};

int cmd_propagate(const PropagateArgs& args) {
  Network net = read_network(args.network);
  AffinityConfig cfg;
  cfg.alpha = args.alpha;
  cfg.sigma = args.sigma;
  cfg.squared_norm = args.squared_norm;
  cfg.kernel =
      args.kernel == "gaussian" ? AffinityKernel::gaussian : AffinityKernel::binary;
  PropagationMatrix pm = build_propagation_matrix(net, cfg);
  write_matrix(args.out, pm.p, !args.text,
               {{"alpha", format_double(pm.alpha)}});
  std::cout << "n " << pm.p.rows() << "\n"
            << "alpha " << format_double(pm.alpha) << "\n"
            << "min_entry " << format_double(pm.p.minCoeff()) << "\n";
  return 0;
}

struct FactorizeArgs {
  std::string ps, pt, out, rules = "printed";
  int k = 20;
  double beta = 1.0;
  std::uint64_t seed = 0;
  int max_sweeps = 200;
  double rel_tol = 1e-8;
  bool normalize_columns = false, text = false;
};

int cmd_factorize(const FactorizeArgs& args) {
  Eigen::MatrixXd ps = read_matrix(args.ps);
  Eigen::MatrixXd pt = read_matrix(args.pt);
  FitConfig cfg;
  cfg.k = args.k;
  cfg.beta = args.beta;
  cfg.seed = args.seed;
  cfg.max_sweeps = args.max_sweeps;
  cfg.rel_tol = args.rel_tol;
  cfg.normalize_columns = args.normalize_columns;
  cfg.rules =
      args.rules == "standard" ? RuleSet::standard_tri_nmf : RuleSet::as_printed;
  FactorizationState state = fit_joint(ps, pt, cfg);
  write_factorization(args.out, state, !args.text);
  std::cout << "sweeps " << state.sweeps << "\n"
            << "initial_objective " << format_double(state.objective_history.front())
            << "\n"
            << "final_objective " << format_double(state.objective_history.back())
            << "\n"
            << "converged " << (state.converged ? 1 : 0) << "\n"
            << "objective_increases " << state.objective_increases << "\n";
  return 0;
}

struct SelectKArgs {
  std::string ps, pt, target, out;
  int k_max = 60, k_step = 10;
  double beta = 1.0, labeled_frac = 0.5;
  std::uint64_t seed = 0, split_seed = 0;
  std::string rules = "printed";
  int max_sweeps = 100;
  bool first_local_max = false;
};

int cmd_select_k(const SelectKArgs& args) {
  Eigen::MatrixXd ps = read_matrix(args.ps);
  Eigen::MatrixXd pt = read_matrix(args.pt);
  Network target_raw = read_network(args.target);
  Network target =
      binarize_labels(target_raw, target_raw.class_name(largest_class(target_raw)));
  LabeledSplit split = split_labeled(target, args.labeled_frac, args.split_seed);

  FitConfig cfg;
  cfg.beta = args.beta;
  cfg.seed = args.seed;
  cfg.k_step = args.k_step;
  cfg.max_sweeps = args.max_sweeps;
  cfg.first_local_max = args.first_local_max;
  cfg.rules =
      args.rules == "standard" ? RuleSet::standard_tri_nmf : RuleSet::as_printed;
  KSelection sel = select_k(ps, pt, split, target.labels(), args.k_max, cfg);

  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot open " + args.out);
  out << "k,quality_score\n";
  for (std::size_t i = 0; i < sel.grid.size(); ++i)
    out << sel.grid[i] << "," << format_double(sel.scores[i]) << "\n";
  std::cout << "best_k " << sel.best_k << "\n";
  return 0;
}

struct TrainArgs {
  std::string source, target, out, method = "trica", kernel = "binary",
              k = "auto", rules = "printed";
  double labeled_frac = 0.1, alpha = 0.5, beta = 1.0, sigma = 1.0, l2 = 1e-3;
  std::uint64_t seed = 0;
  int k_max = 60, k_step = 10, max_sweeps = 200, max_ica_iterations = 100;
};

int cmd_train(const TrainArgs& args) {
  Network source_raw = read_network(args.source);
  Network target_raw = read_network(args.target);
  Network source =
      binarize_labels(source_raw, source_raw.class_name(largest_class(source_raw)));
  const std::string positive = target_raw.class_name(largest_class(target_raw));
  Network target = binarize_labels(target_raw, positive);

  std::uint64_t split_seed = mix_seed(args.seed, 0x5917u);
  LabeledSplit split = split_labeled(target, args.labeled_frac, split_seed);

  PipelineConfig cfg;
  cfg.affinity.alpha = args.alpha;
  cfg.affinity.sigma = args.sigma;
  cfg.affinity.kernel =
      args.kernel == "gaussian" ? AffinityKernel::gaussian : AffinityKernel::binary;
  cfg.fit.beta = args.beta;
  cfg.fit.max_sweeps = args.max_sweeps;
  cfg.fit.k_step = args.k_step;
  cfg.fit.seed = mix_seed(args.seed, 0xFAC7u);
  cfg.fit.rules =
      args.rules == "standard" ? RuleSet::standard_tri_nmf : RuleSet::as_printed;
  cfg.k_max = args.k_max;
  if (args.k == "auto")
    cfg.k_auto = true;
  else
    cfg.fit.k = std::stoi(args.k);
  cfg.ica.seed = args.seed;
  cfg.ica.max_iterations = args.max_ica_iterations;
  cfg.ica.positive_class = target.class_index(positive);
  cfg.train.l2 = args.l2;

  Method method = Method::TrICA;
  if (args.method == "ica") method = Method::ICA;
  else if (args.method == "pica") method = Method::PICA;
  else if (args.method != "trica")
    throw std::runtime_error("unknown method: " + args.method);

  PipelineInfo info;
  IcaResult result = run_method(method, source, target, split, cfg, &info);

  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot open " + args.out);
  std::vector<char> labeled(target.node_count(), 0);
  for (int i : split.labeled) labeled[i] = 1;
  out << "node_id,predicted,probability,was_labeled\n";
  for (int i = 0; i < target.node_count(); ++i)
    out << target.node_id(i) << "," << target.class_name(result.labels[i])
        << "," << format_double(result.probability[i]) << ","
        << int(labeled[i]) << "\n";

  double acc = accuracy(result.labels, target.labels(), split.unlabeled);
  std::cout << "method " << method_name(method) << "\n"
            << "labeled " << split.labeled.size() << "\n"
            << "unlabeled " << split.unlabeled.size() << "\n";
  if (method != Method::ICA) std::cout << "k " << info.k_used << "\n";
  std::cout << "passes " << result.passes << "\n"
            << "stabilized " << (result.stabilized ? 1 : 0) << "\n"
            << "accuracy_unlabeled " << format_double(acc) << "\n";
  return 0;
}

struct ExperimentArgs {
  std::string config, out;
};

int cmd_experiment(const ExperimentArgs& args) {
  ExperimentConfig cfg = load_experiment_config(args.config);
  std::vector<RunResult> results = run_experiment(cfg);
  std::ofstream out(args.out);
  if (!out) throw std::runtime_error("cannot open " + args.out);
  write_results_csv(out, results);
  long failed = 0;
  for (const auto& r : results)
    if (r.failed) {
      ++failed;
      std::cerr << "cell failed: " << r.method << " p=" << r.p
                << " repeat=" << r.repeat_index << ": " << r.error << "\n";
    }
  std::cout << "cells " << results.size() << "\n"
            << "failed " << failed << "\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent structure feature transfer for collective node "
               "classification"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* cmd_in = app.add_subcommand("ingest", "Parse a LINQS dataset into the "
                                              "canonical network format");
  cmd_in->add_option("--content", ingest.content, ".content file")->required();
  cmd_in->add_option("--cites", ingest.cites, ".cites file")->required();
  cmd_in->add_option("--out", ingest.out, "output network file")->required();

  PropagateArgs prop;
  auto* cmd_pr = app.add_subcommand("propagate", "Build the label propagation "
                                                 "matrix P for one network");
  cmd_pr->add_option("--network", prop.network)->required();
  cmd_pr->add_option("--alpha", prop.alpha);
  cmd_pr->add_option("--kernel", prop.kernel)
      ->check(CLI::IsMember({"binary", "gaussian"}));
  cmd_pr->add_option("--sigma", prop.sigma);
  cmd_pr->add_flag("--squared-norm", prop.squared_norm,
                   "use |x|^2 in the Gaussian exponent");
  cmd_pr->add_flag("--text", prop.text, "write a text matrix");
  cmd_pr->add_option("--out", prop.out)->required();

  FactorizeArgs fact;
  auto* cmd_fa = app.add_subcommand("factorize", "Jointly factorize two "
                                                 "propagation matrices");
  cmd_fa->add_option("--ps", fact.ps)->required();
  cmd_fa->add_option("--pt", fact.pt)->required();
  cmd_fa->add_option("--k", fact.k);
  cmd_fa->add_option("--beta", fact.beta);
  cmd_fa->add_option("--seed", fact.seed);
  cmd_fa->add_option("--rules", fact.rules)
      ->check(CLI::IsMember({"printed", "standard"}));
  cmd_fa->add_option("--max-sweeps", fact.max_sweeps);
  cmd_fa->add_option("--rel-tol", fact.rel_tol);
  cmd_fa->add_flag("--normalize-columns", fact.normalize_columns);
  cmd_fa->add_flag("--text", fact.text);
  cmd_fa->add_option("--out", fact.out)->required();

  SelectKArgs selk;
  auto* cmd_sk = app.add_subcommand("select-k", "Sweep k and score the latent "
                                                "features' class coherence");
  cmd_sk->add_option("--ps", selk.ps)->required();
  cmd_sk->add_option("--pt", selk.pt)->required();
  cmd_sk->add_option("--target", selk.target, "target network file")
      ->required();
  cmd_sk->add_option("--kmax", selk.k_max);
  cmd_sk->add_option("--kstep", selk.k_step);
  cmd_sk->add_option("--beta", selk.beta);
  cmd_sk->add_option("--labeled-frac", selk.labeled_frac);
  cmd_sk->add_option("--seed", selk.seed);
  cmd_sk->add_option("--split-seed", selk.split_seed);
  cmd_sk->add_option("--rules", selk.rules)
      ->check(CLI::IsMember({"printed", "standard"}));
  cmd_sk->add_option("--max-sweeps", selk.max_sweeps);
  cmd_sk->add_flag("--first-local-max", selk.first_local_max);
  cmd_sk->add_option("--out", selk.out, "output CSV")->required();

  TrainArgs train;
  auto* cmd_tr = app.add_subcommand("train", "Run one method on a "
                                             "source/target pair");
  cmd_tr->add_option("--source", train.source)->required();
  cmd_tr->add_option("--target", train.target)->required();
  cmd_tr->add_option("--labeled-frac", train.labeled_frac);
  cmd_tr->add_option("--method", train.method)
      ->check(CLI::IsMember({"ica", "pica", "trica"}));
  cmd_tr->add_option("--alpha", train.alpha);
  cmd_tr->add_option("--beta", train.beta);
  cmd_tr->add_option("--sigma", train.sigma);
  cmd_tr->add_option("--kernel", train.kernel)
      ->check(CLI::IsMember({"binary", "gaussian"}));
  cmd_tr->add_option("--k", train.k, "latent dimension or 'auto'");
  cmd_tr->add_option("--kmax", train.k_max);
  cmd_tr->add_option("--kstep", train.k_step);
  cmd_tr->add_option("--rules", train.rules)
      ->check(CLI::IsMember({"printed", "standard"}));
  cmd_tr->add_option("--max-sweeps", train.max_sweeps);
  cmd_tr->add_option("--max-ica-iterations", train.max_ica_iterations);
  cmd_tr->add_option("--l2", train.l2);
  cmd_tr->add_option("--seed", train.seed);
  cmd_tr->add_option("--out", train.out, "per-node prediction CSV")->required();

  ExperimentArgs exp;
  auto* cmd_ex = app.add_subcommand("experiment", "Run a seeded sweep from a "
                                                  "config file");
  cmd_ex->add_option("--config", exp.config)->required();
  cmd_ex->add_option("--out", exp.out, "results CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_in->parsed()) return cmd_ingest(ingest);
    if (cmd_pr->parsed()) return cmd_propagate(prop);
    if (cmd_fa->parsed()) return cmd_factorize(fact);
    if (cmd_sk->parsed()) return cmd_select_k(selk);
    if (cmd_tr->parsed()) return cmd_train(train);
    if (cmd_ex->parsed()) return cmd_experiment(exp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
