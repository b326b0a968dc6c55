#include "hagcl/graph.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include "hagcl/error.hpp"
#include "hagcl/rng.hpp"

namespace hagcl {

DatasetStats compute_stats(const std::vector<Graph>& graphs,
                           std::optional<std::size_t> raw_feature_dim) {
  DatasetStats stats;
  stats.num_graphs = graphs.size();
  stats.num_node_features = raw_feature_dim;
  if (graphs.empty()) return stats;
  double nodes = 0.0, arcs = 0.0;
  std::set<int> classes;
  for (const Graph& g : graphs) {
    nodes += static_cast<double>(g.num_nodes());
    arcs += static_cast<double>(g.arcs.size());
    classes.insert(g.label);
  }
  stats.avg_nodes = nodes / static_cast<double>(graphs.size());
  stats.avg_edges = 0.5 * arcs / static_cast<double>(graphs.size());
  stats.num_classes = classes.size();
  return stats;
}

GraphBatch make_batch(const std::vector<Graph>& graphs, const std::vector<std::size_t>& indices) {
  if (indices.empty()) throw ContractError("make_batch: empty index set");
  for (std::size_t i : indices)
    if (i >= graphs.size()) throw IndexError("make_batch: graph index out of range");

  GraphBatch batch;
  batch.num_graphs = indices.size();
  std::size_t total_nodes = 0, total_arcs = 0;
  const std::size_t d = graphs[indices[0]].feature_dim();
  for (std::size_t i : indices) {
    if (graphs[i].feature_dim() != d)
      throw ShapeError("make_batch: mixed feature dimensions in one batch");
    total_nodes += graphs[i].num_nodes();
    total_arcs += graphs[i].arcs.size();
  }

  batch.node_features = Array({total_nodes, d});
  batch.node_to_graph.reserve(total_nodes);
  batch.arc_src.reserve(total_arcs);
  batch.arc_dst.reserve(total_arcs);
  batch.labels.reserve(indices.size());

  std::size_t node_offset = 0;
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const Graph& g = graphs[indices[b]];
    for (std::size_t r = 0; r < g.num_nodes(); ++r) {
      for (std::size_t c = 0; c < d; ++c)
        batch.node_features.at(node_offset + r, c) = g.node_features.at(r, c);
      batch.node_to_graph.push_back(b);
    }
    for (const auto& [u, v] : g.arcs) {
      batch.arc_src.push_back(node_offset + u);
      batch.arc_dst.push_back(node_offset + v);
    }
    batch.labels.push_back(g.label);
    node_offset += g.num_nodes();
  }

  // Pair reciprocal arcs into undirected edges.  A leftover arc without a
  // partner (directed input, or a self loop) forms a single-arc edge.
  constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);
  batch.arc_edge_index.assign(batch.num_arcs(), kUnassigned);
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> unpaired;
  for (std::size_t a = 0; a < batch.num_arcs(); ++a) {
    const std::size_t u = batch.arc_src[a], v = batch.arc_dst[a];
    const auto key = std::minmax(u, v);
    auto& waiting = unpaired[key];
    if (!waiting.empty() && batch.arc_src[waiting.back()] != u) {
      const std::size_t partner = waiting.back();
      waiting.pop_back();
      const std::size_t e = batch.undirected_edge_pairs.size();
      batch.undirected_edge_pairs.push_back({partner, a});
      batch.arc_edge_index[partner] = e;
      batch.arc_edge_index[a] = e;
    } else {
      waiting.push_back(a);
    }
  }
  for (std::size_t a = 0; a < batch.num_arcs(); ++a) {
    if (batch.arc_edge_index[a] != kUnassigned) continue;
    const std::size_t e = batch.undirected_edge_pairs.size();
    batch.undirected_edge_pairs.push_back({a, a});
    batch.arc_edge_index[a] = e;
  }
  return batch;
}

std::vector<GraphBatch> make_batches(const std::vector<Graph>& graphs, std::size_t batch_size,
                                     std::uint64_t shuffle_seed) {
  if (graphs.empty()) throw ContractError("make_batches: no graphs");
  if (batch_size == 0) throw ContractError("make_batches: batch_size must be >= 1");
  const std::vector<std::size_t> order = rng::shuffled_indices(graphs.size(), shuffle_seed);
  std::vector<GraphBatch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    batches.push_back(
        make_batch(graphs, std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                    order.begin() + static_cast<std::ptrdiff_t>(end))));
  }
  return batches;
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels,
                                                       std::size_t k, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (k < 2) throw ContractError("stratified_kfold: k must be >= 2");
  if (k > n) throw ContractError("stratified_kfold: k exceeds the number of samples");

  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);

  bool stratify = true;
  for (const auto& [label, members] : by_class) {
    if (members.size() < k) {
      std::clog << "[hagcl] stratified_kfold: class " << label << " has " << members.size()
                << " members (< k=" << k << "); falling back to an unstratified split\n";
      stratify = false;
      break;
    }
  }

  std::vector<std::vector<std::size_t>> folds(k);
  if (stratify) {
    std::size_t class_index = 0;
    for (const auto& [label, members] : by_class) {
      const auto perm =
          rng::shuffled_indices(members.size(), rng::derive(seed, rng::stream::kFoldSplit, class_index));
      // Rotate the starting fold per class so remainders spread out.
      for (std::size_t i = 0; i < members.size(); ++i)
        folds[(i + class_index) % k].push_back(members[perm[i]]);
      ++class_index;
    }
  } else {
    const auto perm = rng::shuffled_indices(n, rng::derive(seed, rng::stream::kFoldSplit));
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(perm[i]);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

}  // namespace hagcl
