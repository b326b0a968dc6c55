#pragma once

#include <string>
#include <vector>

#include "hagcl/graph.hpp"

namespace hagcl {

struct TuDataset {
  std::string name;
  std::vector<Graph> graphs;
  DatasetStats stats;
};

// Reads a dataset in the TU text convention from `directory`:
//
//   <DS>_A.txt               comma-separated 1-indexed node pairs, one arc per line
//   <DS>_graph_indicator.txt 1-indexed graph id per node line
//   <DS>_graph_labels.txt    integer class per graph line
//   <DS>_node_labels.txt     optional; one-hot encoded into features
//   <DS>_node_attributes.txt optional; real-valued columns, concatenated after one-hots
//
// Node ids are rebased to 0-indexed local ids per graph.  Graph labels are
// remapped to contiguous [0, num_classes).  When neither node labels nor
// attributes exist, a single constant-1 feature column is injected.
// Edge label/attribute files are ignored with a logged notice.
TuDataset parse_tu_dataset(const std::string& directory, const std::string& name);

// Writes graphs back out in the same convention (used by fixtures and
// round-trip checks).  When `include_attributes` is set the feature matrix
// is written as <DS>_node_attributes.txt; otherwise no node files are
// produced and a re-parse injects the constant-1 column.
void write_tu_dataset(const std::string& directory, const std::string& name,
                      const std::vector<Graph>& graphs, bool include_attributes = false);

}  // namespace hagcl
