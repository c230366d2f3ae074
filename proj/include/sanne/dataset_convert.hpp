#pragma once

#include <string>

#include "sanne/graph.hpp"

namespace sanne {

struct ConversionReport {
  int num_nodes = 0;
  std::int64_t num_edges = 0;
  int num_classes = 0;
  int vocab = 0;
  int dangling_dropped = 0;   // cites rows referencing unknown ids
  int self_loops_dropped = 0;
  std::string content_file;
  std::string cites_file;
};

// Converts the community-standard citation layout (<name>.content with
// "id w_1..w_V label" rows, <name>.cites with "cited citing" rows) into this
// project's edge-list/bow/label/id-map files under out_dir:
//   edges.tsv, bow.tsv, labels.tsv, idmap.tsv
// String ids are remapped to dense ints in content-row order; citation
// direction is discarded and duplicates collapse.
ConversionReport convert_citation_dataset(const std::string& raw_dir, const std::string& out_dir);

struct ExpectedStats {
  int num_nodes = -1;
  std::int64_t num_edges = -1;
  int num_classes = -1;
  int vocab = -1;
  double avg_degree = -1.0;    // checked within +-0.1 when set
  double edge_tolerance = 0.01;  // relative slack on the edge count
};

struct VerifyResult {
  bool ok = true;
  std::string report;  // one line per checked field
};

// Recomputes the converted statistics and diffs them against expectations.
VerifyResult verify_stats(const std::string& converted_dir, const ExpectedStats& expected);

}  // namespace sanne
