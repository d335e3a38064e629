#include "trica/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "trica/factorization.hpp"

namespace trica {

namespace {

constexpr const char* kNetworkMagic = "trica-network 1";
constexpr const char* kMatrixMagicBin = "trica-matrix 1 bin";
constexpr const char* kMatrixMagicText = "trica-matrix 1 text";
constexpr const char* kFactMagic = "trica-factorization 1";

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

std::string expect_line(std::istream& in, const std::string& context) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("truncated " + context);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void write_le_doubles(std::ostream& out, const Eigen::MatrixXd& m) {
  // Row-major payload; host is little-endian on every supported target.
  std::vector<double> row(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[j] = m(i, j);
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
}

void read_le_doubles(std::istream& in, Eigen::MatrixXd& m) {
  std::vector<double> row(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated matrix payload");
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = row[j];
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_network(const std::string& path, const Network& network) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << kNetworkMagic << "\n";
  out << "nodes " << network.node_count() << " features "
      << network.feature_dim() << " classes " << network.class_count() << "\n";
  for (const auto& c : network.class_names()) out << "class " << c << "\n";
  for (int i = 0; i < network.node_count(); ++i) {
    out << network.node_id(i) << " "
        << (network.is_labeled(i) ? network.class_name(network.label(i)) : "-");
    for (int j = 0; j < network.feature_dim(); ++j)
      out << " " << format_double(network.features()(i, j));
    out << "\n";
  }
  auto edges = network.edges();
  out << "edges " << edges.size() << "\n";
  for (const auto& [i, j] : edges) out << i << " " << j << "\n";
  if (!out) fail(path, "write failed");
}

Network read_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  if (expect_line(in, path) != kNetworkMagic) fail(path, "bad magic line");

  int n = 0, d = 0, c = 0;
  {
    std::istringstream hdr(expect_line(in, path));
    std::string kw1, kw2, kw3;
    hdr >> kw1 >> n >> kw2 >> d >> kw3 >> c;
    if (kw1 != "nodes" || kw2 != "features" || kw3 != "classes" || !hdr)
      fail(path, "bad header");
  }
  std::vector<std::string> classes(c);
  for (int i = 0; i < c; ++i) {
    std::istringstream line(expect_line(in, path));
    std::string kw;
    line >> kw >> classes[i];
    if (kw != "class" || !line) fail(path, "bad class line");
  }
  std::vector<std::string> ids(n), labels(n);
  Eigen::MatrixXd features(n, d);
  for (int i = 0; i < n; ++i) {
    std::istringstream line(expect_line(in, path));
    std::string label;
    line >> ids[i] >> label;
    if (!line) fail(path, "bad node line");
    labels[i] = label == "-" ? "" : label;
    for (int j = 0; j < d; ++j) {
      if (!(line >> features(i, j))) fail(path, "bad node feature");
    }
  }
  long m = 0;
  {
    std::istringstream line(expect_line(in, path));
    std::string kw;
    line >> kw >> m;
    if (kw != "edges" || !line) fail(path, "bad edges header");
  }
  std::vector<std::pair<int, int>> edges(m);
  for (long e = 0; e < m; ++e) {
    std::istringstream line(expect_line(in, path));
    if (!(line >> edges[e].first >> edges[e].second))
      fail(path, "bad edge line");
  }
  return Network(std::move(ids), edges, std::move(features), labels, classes);
}

void write_matrix_section(std::ostream& out, const Eigen::MatrixXd& m,
                          bool binary) {
  out << (binary ? kMatrixMagicBin : kMatrixMagicText) << "\n";
  out << "rows " << m.rows() << " cols " << m.cols() << "\n";
  out << "data\n";
  if (binary) {
    write_le_doubles(out, m);
  } else {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out << " ";
        out << format_double(m(i, j));
      }
      out << "\n";
    }
  }
}

Eigen::MatrixXd read_matrix_section_with_meta(
    std::istream& in, std::map<std::string, std::string>* meta) {
  std::string magic = expect_line(in, "matrix header");
  bool binary;
  if (magic == kMatrixMagicBin)
    binary = true;
  else if (magic == kMatrixMagicText)
    binary = false;
  else
    throw std::runtime_error("bad matrix magic: " + magic);

  Eigen::Index rows = -1, cols = -1;
  for (;;) {
    std::string line = expect_line(in, "matrix header");
    if (line == "data") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "rows") {
      std::string kw;
      ls >> rows >> kw >> cols;
      if (kw != "cols" || !ls) throw std::runtime_error("bad matrix dims");
    } else {
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      if (meta) (*meta)[key] = value;
    }
  }
  if (rows < 0 || cols < 0) throw std::runtime_error("matrix dims missing");

  Eigen::MatrixXd m(rows, cols);
  if (binary) {
    read_le_doubles(in, m);
  } else {
    for (Eigen::Index i = 0; i < rows; ++i) {
      std::istringstream line(expect_line(in, "matrix row"));
      for (Eigen::Index j = 0; j < cols; ++j)
        if (!(line >> m(i, j))) throw std::runtime_error("bad matrix row");
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix_section(std::istream& in) {
  return read_matrix_section_with_meta(in, nullptr);
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m,
                  bool binary,
                  const std::map<std::string, std::string>& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << (binary ? kMatrixMagicBin : kMatrixMagicText) << "\n";
  out << "rows " << m.rows() << " cols " << m.cols() << "\n";
  for (const auto& [k, v] : meta) out << k << " " << v << "\n";
  out << "data\n";
  if (binary) {
    write_le_doubles(out, m);
  } else {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out << " ";
        out << format_double(m(i, j));
      }
      out << "\n";
    }
  }
  if (!out) fail(path, "write failed");
}

Eigen::MatrixXd read_matrix(const std::string& path,
                            std::map<std::string, std::string>* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  return read_matrix_section_with_meta(in, meta);
}

void write_factorization(const std::string& path,
                         const FactorizationState& state, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << kFactMagic << "\n";
  out << "k " << state.k << "\n";
  out << "beta " << format_double(state.beta) << "\n";
  out << "rules "
      << (state.rules == RuleSet::as_printed ? "printed" : "standard") << "\n";
  out << "seed " << state.seed << "\n";
  out << "sweeps " << state.sweeps << "\n";
  out << "converged " << (state.converged ? 1 : 0) << "\n";
  out << "objective_increases " << state.objective_increases << "\n";
  out << "max_relative_increase " << format_double(state.max_relative_increase)
      << "\n";
  out << "best_objective " << format_double(state.best_objective) << "\n";
  out << "objective_history " << state.objective_history.size();
  for (double v : state.objective_history) out << " " << format_double(v);
  out << "\n";
  for (const auto* m : {&state.Fs, &state.Rs, &state.Ft, &state.Rt, &state.A})
    write_matrix_section(out, *m, binary);
  if (!out) fail(path, "write failed");
}

FactorizationState read_factorization(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  if (expect_line(in, path) != kFactMagic) fail(path, "bad magic line");

  FactorizationState state;
  auto kv = [&](const std::string& key) {
    std::istringstream line(expect_line(in, path));
    std::string k;
    line >> k;
    if (k != key) fail(path, "expected key " + key);
    return line.str().substr(key.size() + 1);
  };
  state.k = std::stoi(kv("k"));
  state.beta = std::stod(kv("beta"));
  std::string rules = kv("rules");
  state.rules =
      rules == "printed" ? RuleSet::as_printed : RuleSet::standard_tri_nmf;
  state.seed = std::stoull(kv("seed"));
  state.sweeps = std::stoi(kv("sweeps"));
  state.converged = std::stoi(kv("converged")) != 0;
  state.objective_increases = std::stoi(kv("objective_increases"));
  state.max_relative_increase = std::stod(kv("max_relative_increase"));
  state.best_objective = std::stod(kv("best_objective"));
  {
    std::istringstream line(expect_line(in, path));
    std::string k;
    std::size_t count;
    line >> k >> count;
    if (k != "objective_history" || !line) fail(path, "bad history line");
    state.objective_history.resize(count);
    for (std::size_t i = 0; i < count; ++i)
      if (!(line >> state.objective_history[i])) fail(path, "bad history");
  }
  state.Fs = read_matrix_section(in);
  state.Rs = read_matrix_section(in);
  state.Ft = read_matrix_section(in);
  state.Rt = read_matrix_section(in);
  state.A = read_matrix_section(in);
  return state;
}

}  // namespace trica
