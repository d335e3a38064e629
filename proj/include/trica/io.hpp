#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>

#include "trica/graph.hpp"

namespace trica {

struct FactorizationState;

/// Canonical line-oriented network file (versioned):
///   trica-network 1
///   nodes N features D classes C
///   C lines:  class <name>
///   N lines:  <id> <label-or-"-"> <f1> ... <fD>
///   edges M
///   M lines:  <i> <j>        (node indices, i < j)
void write_network(const std::string& path, const Network& network);
Network read_network(const std::string& path);

/// Versioned dense matrix file, row-major. `binary` stores the payload
/// as little-endian float64; text mode prints full-precision decimals.
/// `meta` key/value pairs land in the header (e.g. alpha for a
/// propagation matrix).
void write_matrix(const std::string& path, const Eigen::MatrixXd& m,
                  bool binary = true,
                  const std::map<std::string, std::string>& meta = {});
Eigen::MatrixXd read_matrix(const std::string& path,
                            std::map<std::string, std::string>* meta = nullptr);

void write_matrix_section(std::ostream& out, const Eigen::MatrixXd& m,
                          bool binary);
Eigen::MatrixXd read_matrix_section(std::istream& in);

/// Factorization container: header with k/beta/seed/history followed by
/// the five factor matrices.
void write_factorization(const std::string& path,
                         const FactorizationState& state,
                         bool binary = true);
FactorizationState read_factorization(const std::string& path);

/// Full-precision decimal form of a double (round-trips exactly).
std::string format_double(double v);

}  // namespace trica
