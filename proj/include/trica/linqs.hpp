#pragma once

#include <string>

#include "trica/graph.hpp"

namespace trica {

/// A LINQS-style dataset on disk: a `.content` file with lines
/// `id f1 ... fd label` and a `.cites` file with lines `cited citing`.
/// Fields may be separated by tabs or spaces.
struct LinqsDataset {
  std::string content_path;
  std::string cites_path;
};

/// Loader bookkeeping: how many link lines the raw file contained and
/// what was dropped while building the undirected edge set.
struct LinqsReport {
  long raw_link_lines = 0;
  long deduplicated_edges = 0;
  long dropped_unknown_refs = 0;  // lines naming an id absent from .content
  long dropped_self_links = 0;
  long duplicate_links = 0;  // repeated undirected pairs
};

/// Parses a LINQS dataset into an undirected, self-loop-free network.
/// Link direction is ignored, duplicate pairs are collapsed, and links
/// naming unknown ids are dropped (counted in the report).
Network load_linqs(const LinqsDataset& dataset, LinqsReport* report = nullptr);

}  // namespace trica
