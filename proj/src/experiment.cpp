#include "trica/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "trica/io.hpp"
#include "trica/rng.hpp"

namespace trica {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string dataset_name(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  return dot == std::string::npos ? base : base.substr(0, dot);
}

Method parse_method(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "ica") return Method::ICA;
  if (lower == "pica") return Method::PICA;
  if (lower == "trica") return Method::TrICA;
  throw std::runtime_error("unknown method: " + name);
}

struct Cell {
  int sweep_index = 0;   // position in the active grid
  double p = 0.0;
  double beta = 0.0;
  int k_fixed = 0;       // 0 = use config (possibly auto)
  int repeat = 0;
};

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::ICA: return "ICA";
    case Method::PICA: return "PICA";
    case Method::TrICA: return "TrICA";
  }
  return "?";
}

double accuracy(const std::vector<int>& predicted,
                const std::vector<int>& truth,
                const std::vector<int>& eval_set) {
  if (eval_set.empty()) throw std::invalid_argument("empty evaluation set");
  long correct = 0;
  for (int i : eval_set)
    if (predicted.at(i) == truth.at(i)) ++correct;
  return static_cast<double>(correct) / static_cast<double>(eval_set.size());
}

Eigen::MatrixXd pica_features(const Network& target, const LabeledSplit& split,
                              const PipelineConfig& config,
                              PipelineInfo* info) {
  PropagationMatrix pt = build_propagation_matrix(target, config.affinity);
  FitConfig fit = config.fit;
  fit.k = std::max(2, fit.k);
  KSelection selection;
  if (config.k_auto) {
    selection =
        select_k_single(pt.p, split, target.labels(), config.k_max, fit);
    fit.k = selection.best_k;
    fit.seed = mix_seed(config.fit.seed, static_cast<std::uint64_t>(fit.k));
  }
  SingleFactorization factorization = fit_single(pt.p, fit);
  if (info) {
    info->k_used = fit.k;
    info->objective_history = factorization.objective_history;
    info->fit_converged = factorization.converged;
    info->selection = selection;
  }
  return factorization.F;
}

IcaResult run_method(Method method, const Network& source,
                     const Network& target, const LabeledSplit& split,
                     const PipelineConfig& config, PipelineInfo* info) {
  switch (method) {
    case Method::ICA:
      return run_ica(target, split, std::nullopt, config.ica, config.train);
    case Method::PICA: {
      Eigen::MatrixXd latent = pica_features(target, split, config, info);
      return run_ica(target, split, latent, config.ica, config.train);
    }
    case Method::TrICA:
      return tr_ica(source, target, split, config, info);
  }
  throw std::logic_error("unreachable");
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);

  ExperimentConfig cfg;
  bool methods_set = false;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    try {
      if (key == "source") cfg.source_path = value;
      else if (key == "target") cfg.target_path = value;
      else if (key == "methods") {
        cfg.methods.clear();
        for (const auto& m : split_list(value))
          cfg.methods.push_back(parse_method(m));
        methods_set = true;
      } else if (key == "p_grid") {
        cfg.p_grid.clear();
        for (const auto& v : split_list(value))
          cfg.p_grid.push_back(std::stod(v));
      } else if (key == "repeats") cfg.repeats = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "stratified") cfg.stratified = std::stoi(value) != 0;
      else if (key == "beta_grid") {
        for (const auto& v : split_list(value))
          cfg.beta_grid.push_back(std::stod(v));
      } else if (key == "k_grid") {
        for (const auto& v : split_list(value))
          cfg.k_grid.push_back(std::stoi(v));
      } else if (key == "p_fixed") cfg.p_fixed = std::stod(value);
      else if (key == "alpha") cfg.pipeline.affinity.alpha = std::stod(value);
      else if (key == "kernel") {
        if (value == "binary")
          cfg.pipeline.affinity.kernel = AffinityKernel::binary;
        else if (value == "gaussian")
          cfg.pipeline.affinity.kernel = AffinityKernel::gaussian;
        else throw std::runtime_error("unknown kernel: " + value);
      } else if (key == "sigma") cfg.pipeline.affinity.sigma = std::stod(value);
      else if (key == "squared_norm")
        cfg.pipeline.affinity.squared_norm = std::stoi(value) != 0;
      else if (key == "beta") cfg.pipeline.fit.beta = std::stod(value);
      else if (key == "k") {
        if (value == "auto") cfg.pipeline.k_auto = true;
        else {
          cfg.pipeline.k_auto = false;
          cfg.pipeline.fit.k = std::stoi(value);
        }
      } else if (key == "k_max") cfg.pipeline.k_max = std::stoi(value);
      else if (key == "k_step") cfg.pipeline.fit.k_step = std::stoi(value);
      else if (key == "rules") {
        if (value == "printed")
          cfg.pipeline.fit.rules = RuleSet::as_printed;
        else if (value == "standard")
          cfg.pipeline.fit.rules = RuleSet::standard_tri_nmf;
        else throw std::runtime_error("unknown rules: " + value);
      } else if (key == "max_sweeps")
        cfg.pipeline.fit.max_sweeps = std::stoi(value);
      else if (key == "rel_tol") cfg.pipeline.fit.rel_tol = std::stod(value);
      else if (key == "normalize_columns")
        cfg.pipeline.fit.normalize_columns = std::stoi(value) != 0;
      else if (key == "max_ica_iterations")
        cfg.pipeline.ica.max_iterations = std::stoi(value);
      else if (key == "aggregation") {
        if (value == "proportion")
          cfg.pipeline.ica.aggregation = Aggregation::proportion;
        else if (value == "count")
          cfg.pipeline.ica.aggregation = Aggregation::count;
        else if (value == "mode")
          cfg.pipeline.ica.aggregation = Aggregation::mode;
        else throw std::runtime_error("unknown aggregation: " + value);
      } else if (key == "l2") cfg.pipeline.train.l2 = std::stod(value);
      else throw std::runtime_error("unknown key: " + key);
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad value for " + key);
    }
  }
  if (cfg.source_path.empty() || cfg.target_path.empty())
    throw std::runtime_error(path + ": source and target are required");
  if (!cfg.beta_grid.empty() && !cfg.k_grid.empty())
    throw std::runtime_error(path + ": beta_grid and k_grid are exclusive");
  if (cfg.repeats < 1) throw std::runtime_error(path + ": repeats must be >= 1");
  for (double p : cfg.p_grid)
    if (!(p > 0.0 && p < 1.0))
      throw std::runtime_error(path + ": p values must be in (0, 1)");
  (void)methods_set;
  return cfg;
}

std::vector<RunResult> run_experiment(const ExperimentConfig& config) {
  Network source_raw = read_network(config.source_path);
  Network target_raw = read_network(config.target_path);
  Network source =
      binarize_labels(source_raw, source_raw.class_name(largest_class(source_raw)));
  const std::string target_positive =
      target_raw.class_name(largest_class(target_raw));
  Network target = binarize_labels(target_raw, target_positive);
  const int positive_index = target.class_index(target_positive);

  const std::string source_name = dataset_name(config.source_path);
  const std::string target_name = dataset_name(config.target_path);

  // Active sweep: beta grid, k grid, or the default p grid.
  std::vector<Cell> cells;
  if (!config.beta_grid.empty()) {
    for (std::size_t s = 0; s < config.beta_grid.size(); ++s)
      for (int r = 0; r < config.repeats; ++r)
        cells.push_back({static_cast<int>(s), config.p_fixed,
                         config.beta_grid[s], 0, r});
  } else if (!config.k_grid.empty()) {
    for (std::size_t s = 0; s < config.k_grid.size(); ++s)
      for (int r = 0; r < config.repeats; ++r)
        cells.push_back({static_cast<int>(s), config.p_fixed,
                         config.pipeline.fit.beta, config.k_grid[s], r});
  } else {
    for (std::size_t s = 0; s < config.p_grid.size(); ++s)
      for (int r = 0; r < config.repeats; ++r)
        cells.push_back({static_cast<int>(s), config.p_grid[s],
                         config.pipeline.fit.beta, 0, r});
  }

  std::vector<RunResult> results;
  for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
    Method method = config.methods[mi];
    for (const Cell& cell : cells) {
      // The split depends only on (sweep value, repeat) so every method
      // sees the same labeled nodes in the same cell.
      std::uint64_t split_seed = mix_seed(
          config.seed, mix_seed(static_cast<std::uint64_t>(cell.sweep_index),
                                static_cast<std::uint64_t>(cell.repeat)));
      std::uint64_t method_seed = mix_seed(split_seed, mi + 1);

      RunResult row;
      row.method = method_name(method);
      row.source = source_name;
      row.target = target_name;
      row.p = cell.p;
      row.beta = cell.beta;
      row.repeat_index = cell.repeat;
      row.seed = method_seed;

      auto t0 = std::chrono::steady_clock::now();
      try {
        LabeledSplit split =
            split_labeled(target, cell.p, split_seed, config.stratified);
        PipelineConfig pipeline = config.pipeline;
        pipeline.fit.beta = cell.beta;
        if (cell.k_fixed > 0) {
          pipeline.k_auto = false;
          pipeline.fit.k = cell.k_fixed;
        }
        pipeline.ica.seed = method_seed;
        pipeline.fit.seed = mix_seed(method_seed, 0xFAC7u);
        pipeline.ica.positive_class = positive_index;

        PipelineInfo info;
        IcaResult r = run_method(method, source, target, split, pipeline, &info);
        row.accuracy = accuracy(r.labels, target.labels(), split.unlabeled);
        row.converged = r.stabilized;
        row.k = method == Method::ICA ? 0 : info.k_used;
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
        row.accuracy = std::numeric_limits<double>::quiet_NaN();
      }
      auto t1 = std::chrono::steady_clock::now();
      row.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
      results.push_back(std::move(row));
    }
  }
  return results;
}

void write_results_csv(std::ostream& out,
                       const std::vector<RunResult>& results) {
  out << "method,source,target,p,beta,k,repeat,seed,accuracy,converged,"
         "wall_time_s\n";
  auto emit = [&out](const RunResult& r, bool mean_row) {
    char wall[32];
    std::snprintf(wall, sizeof(wall), "%.3f", r.wall_time_s);
    out << r.method << "," << r.source << "," << r.target << ","
        << format_double(r.p) << "," << format_double(r.beta) << "," << r.k
        << ",";
    if (mean_row)
      out << "mean,-,";
    else
      out << r.repeat_index << "," << r.seed << ",";
    out << format_double(r.accuracy) << "," << (r.converged ? 1 : 0) << ","
        << wall << "\n";
  };

  // Rows arrive grouped by (method, sweep value); a mean row follows each
  // group.
  std::size_t i = 0;
  while (i < results.size()) {
    std::size_t j = i;
    while (j < results.size() && results[j].method == results[i].method &&
           results[j].p == results[i].p && results[j].beta == results[i].beta)
      ++j;
    double sum = 0.0, wall = 0.0;
    long ok = 0;
    bool all_converged = true;
    int k_last = 0;
    for (std::size_t r = i; r < j; ++r) {
      emit(results[r], false);
      wall += results[r].wall_time_s;
      k_last = results[r].k;
      if (!results[r].failed) {
        sum += results[r].accuracy;
        ++ok;
        all_converged = all_converged && results[r].converged;
      } else {
        all_converged = false;
      }
    }
    RunResult mean = results[i];
    mean.k = k_last;
    mean.accuracy =
        ok > 0 ? sum / ok : std::numeric_limits<double>::quiet_NaN();
    mean.converged = all_converged;
    mean.wall_time_s = wall / static_cast<double>(j - i);
    emit(mean, true);
    i = j;
  }
}

bool any_failed(const std::vector<RunResult>& results) {
  return std::any_of(results.begin(), results.end(),
                     [](const RunResult& r) { return r.failed; });
}

}  // namespace trica
