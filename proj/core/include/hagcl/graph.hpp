#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hagcl/array.hpp"

namespace hagcl {

// One graph.  Arcs are directed; undirected input data is stored as both
// orientations.  Edgeless graphs are allowed.
struct Graph {
  Array node_features;  // [num_nodes x d_in], at least one column
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  int label = 0;
  std::size_t graph_id = 0;

  std::size_t num_nodes() const { return node_features.rows(); }
  std::size_t feature_dim() const { return node_features.row_size(); }
};

// Disjoint union of a set of graphs.  Node ids are offset per graph;
// node_to_graph is the graph indicator.  Each undirected edge maps to its
// two reciprocal arcs through undirected_edge_pairs, and arc_edge_index is
// the inverse map.
struct GraphBatch {
  Array node_features;
  std::vector<std::size_t> arc_src;
  std::vector<std::size_t> arc_dst;
  std::vector<std::size_t> node_to_graph;
  std::vector<std::array<std::size_t, 2>> undirected_edge_pairs;
  std::vector<std::size_t> arc_edge_index;
  std::vector<int> labels;
  std::size_t num_graphs = 0;

  std::size_t num_nodes() const { return node_to_graph.size(); }
  std::size_t num_arcs() const { return arc_src.size(); }
  std::size_t num_undirected_edges() const { return undirected_edge_pairs.size(); }
};

struct DatasetStats {
  std::size_t num_graphs = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;  // undirected count: reciprocal arc pairs count once
  std::size_t num_classes = 0;
  // Dimension of the features the dataset ships; nullopt when none exist and
  // a constant-1 column was injected instead.
  std::optional<std::size_t> num_node_features;
};

DatasetStats compute_stats(const std::vector<Graph>& graphs,
                           std::optional<std::size_t> raw_feature_dim);

// Batch a specific set of graphs, in the given order.
GraphBatch make_batch(const std::vector<Graph>& graphs, const std::vector<std::size_t>& indices);

// Deterministic shuffle under the seed, then fixed-size chunks (the last
// may be smaller).  Every graph lands in exactly one batch.
std::vector<GraphBatch> make_batches(const std::vector<Graph>& graphs, std::size_t batch_size,
                                     std::uint64_t shuffle_seed);

// k disjoint index sets covering [0, labels.size()), per-class counts across
// folds differing by at most one.  Falls back to an unstratified split (with
// a logged warning) when some class has fewer than k members.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels,
                                                       std::size_t k, std::uint64_t seed);

}  // namespace hagcl
