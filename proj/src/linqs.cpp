#include "trica/linqs.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace trica {
namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

double parse_real(const std::string& tok, const std::string& context) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw std::runtime_error("bad feature value '" + tok + "' " + context);
  return v;
}

}  // namespace

Network load_linqs(const LinqsDataset& dataset, LinqsReport* report) {
  std::ifstream content(dataset.content_path);
  if (!content)
    throw std::runtime_error("cannot open " + dataset.content_path);

  std::vector<std::string> node_ids;
  std::vector<std::string> label_names;
  std::vector<std::vector<double>> rows;
  std::unordered_map<std::string, int> index_of;
  int dim = -1;

  std::string line;
  long lineno = 0;
  while (std::getline(content, line)) {
    ++lineno;
    if (blank(line)) continue;
    auto tokens = split_ws(line);
    const std::string where =
        "at " + dataset.content_path + ":" + std::to_string(lineno);
    if (tokens.size() < 3)
      throw std::runtime_error("content line has too few columns " + where);
    int d = static_cast<int>(tokens.size()) - 2;
    if (dim < 0) dim = d;
    if (d != dim)
      throw std::runtime_error("inconsistent feature dimension " + where);
    if (index_of.count(tokens.front()))
      throw std::runtime_error("duplicate node id '" + tokens.front() + "' " +
                               where);
    index_of[tokens.front()] = static_cast<int>(node_ids.size());
    node_ids.push_back(tokens.front());
    label_names.push_back(tokens.back());
    std::vector<double> feats(dim);
    for (int j = 0; j < dim; ++j) feats[j] = parse_real(tokens[j + 1], where);
    rows.push_back(std::move(feats));
  }
  if (node_ids.empty())
    throw std::runtime_error("empty content file: " + dataset.content_path);

  std::ifstream cites(dataset.cites_path);
  if (!cites) throw std::runtime_error("cannot open " + dataset.cites_path);

  LinqsReport rep;
  std::set<std::pair<int, int>> edge_set;
  lineno = 0;
  while (std::getline(cites, line)) {
    ++lineno;
    if (blank(line)) continue;
    ++rep.raw_link_lines;
    auto tokens = split_ws(line);
    if (tokens.size() != 2)
      throw std::runtime_error("cites line must have two columns at " +
                               dataset.cites_path + ":" +
                               std::to_string(lineno));
    auto a = index_of.find(tokens[0]);
    auto b = index_of.find(tokens[1]);
    if (a == index_of.end() || b == index_of.end()) {
      ++rep.dropped_unknown_refs;
      continue;
    }
    if (a->second == b->second) {
      ++rep.dropped_self_links;
      continue;
    }
    auto e = std::minmax(a->second, b->second);
    if (!edge_set.insert({e.first, e.second}).second) ++rep.duplicate_links;
  }
  rep.deduplicated_edges = static_cast<long>(edge_set.size());

  const int n = static_cast<int>(node_ids.size());
  Eigen::MatrixXd features(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) features(i, j) = rows[i][j];

  std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
  if (report) *report = rep;
  return Network(std::move(node_ids), edges, std::move(features),
                 label_names);
}

}  // namespace trica
