#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "hagcl/error.hpp"
#include "hagcl/graph.hpp"
#include "hagcl/tu_io.hpp"
#include "testutil.hpp"

using namespace hagcl;
namespace fs = std::filesystem;

namespace {

const std::string kFixtureDir = std::string(HAGCL_TEST_DATA_DIR) + "/FIXTURE3";

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("hagcl_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("fixture parses to the hand-known statistics") {
  const TuDataset ds = parse_tu_dataset(kFixtureDir, "FIXTURE3");
  CHECK(ds.stats.num_graphs == 3);
  CHECK(ds.stats.avg_nodes == doctest::Approx(3.0));
  CHECK(ds.stats.avg_edges == doctest::Approx(2.0));  // 3 + 3 + 0 undirected
  CHECK(ds.stats.num_classes == 2);
  CHECK_FALSE(ds.stats.num_node_features.has_value());

  REQUIRE(ds.graphs.size() == 3);
  CHECK(ds.graphs[0].num_nodes() == 3);
  CHECK(ds.graphs[0].arcs.size() == 6);
  CHECK(ds.graphs[1].num_nodes() == 4);
  CHECK(ds.graphs[1].arcs.size() == 6);
  CHECK(ds.graphs[2].num_nodes() == 2);
  CHECK(ds.graphs[2].arcs.empty());
  // Labels 1,2,1 remap to 0,1,0.
  CHECK(ds.graphs[0].label == 0);
  CHECK(ds.graphs[1].label == 1);
  CHECK(ds.graphs[2].label == 0);
}

TEST_CASE("datasets without node files get the constant-1 column") {
  const TuDataset ds = parse_tu_dataset(kFixtureDir, "FIXTURE3");
  for (const Graph& g : ds.graphs) {
    CHECK(g.feature_dim() == 1);
    for (std::size_t r = 0; r < g.num_nodes(); ++r) CHECK(g.node_features.at(r, 0) == 1.0);
  }
}

TEST_CASE("missing mandatory file names the file") {
  const fs::path dir = fresh_dir("missing");
  CHECK_THROWS_WITH_AS(parse_tu_dataset(dir.string(), "NOPE"),
                       doctest::Contains("NOPE_graph_indicator.txt"), DataError);
}

TEST_CASE("arc crossing graphs reports the line number") {
  const fs::path dir = fresh_dir("cross");
  std::ofstream(dir / "X_graph_indicator.txt") << "1\n1\n2\n2\n";
  std::ofstream(dir / "X_graph_labels.txt") << "0\n1\n";
  std::ofstream(dir / "X_A.txt") << "1, 2\n2, 1\n2, 3\n";
  CHECK_THROWS_WITH_AS(parse_tu_dataset(dir.string(), "X"), doctest::Contains("X_A.txt:3"),
                       DataError);
}

TEST_CASE("non-integer input reports file and line") {
  const fs::path dir = fresh_dir("nonint");
  std::ofstream(dir / "X_graph_indicator.txt") << "1\n1\n2\n2\n";
  std::ofstream(dir / "X_graph_labels.txt") << "0\noops\n";
  std::ofstream(dir / "X_A.txt") << "1, 2\n2, 1\n";
  CHECK_THROWS_WITH_AS(parse_tu_dataset(dir.string(), "X"),
                       doctest::Contains("X_graph_labels.txt:2"), DataError);
}

TEST_CASE("node labels one-hot encode and concatenate with attributes") {
  const fs::path dir = fresh_dir("feat");
  std::ofstream(dir / "Y_graph_indicator.txt") << "1\n1\n2\n2\n";
  std::ofstream(dir / "Y_graph_labels.txt") << "-1\n1\n";
  std::ofstream(dir / "Y_A.txt") << "1, 2\n2, 1\n3, 4\n4, 3\n";
  std::ofstream(dir / "Y_node_labels.txt") << "7\n3\n7\n3\n";
  std::ofstream(dir / "Y_node_attributes.txt") << "0.5, 1.5\n2.5, 3.5\n4.5, 5.5\n6.5, 7.5\n";
  const TuDataset ds = parse_tu_dataset(dir.string(), "Y");
  REQUIRE(ds.stats.num_node_features == 4);  // 2 one-hot + 2 attributes
  // Node 0 has label 7 -> one-hot slot 1 (labels sorted: 3, 7).
  const Graph& g0 = ds.graphs[0];
  CHECK(g0.node_features.at(0, 0) == 0.0);
  CHECK(g0.node_features.at(0, 1) == 1.0);
  CHECK(g0.node_features.at(0, 2) == 0.5);
  CHECK(g0.node_features.at(0, 3) == 1.5);
  CHECK(g0.node_features.at(1, 0) == 1.0);
  CHECK(g0.node_features.at(1, 1) == 0.0);
  // Graph labels -1, 1 remap to 0, 1.
  CHECK(ds.graphs[0].label == 0);
  CHECK(ds.graphs[1].label == 1);
}

TEST_CASE("edge attribute files are ignored") {
  const fs::path dir = fresh_dir("edgeattr");
  std::ofstream(dir / "Z_graph_indicator.txt") << "1\n1\n2\n2\n";
  std::ofstream(dir / "Z_graph_labels.txt") << "0\n1\n";
  std::ofstream(dir / "Z_A.txt") << "1, 2\n2, 1\n3, 4\n4, 3\n";
  std::ofstream(dir / "Z_edge_attributes.txt") << "9.9\n9.9\n9.9\n9.9\n";
  const TuDataset ds = parse_tu_dataset(dir.string(), "Z");
  CHECK(ds.graphs.size() == 2);
}

TEST_CASE("write-back round-trips the statistics exactly") {
  const TuDataset original = parse_tu_dataset(kFixtureDir, "FIXTURE3");
  const fs::path dir = fresh_dir("roundtrip");
  write_tu_dataset(dir.string(), "FIXTURE3", original.graphs);
  const TuDataset reparsed = parse_tu_dataset(dir.string(), "FIXTURE3");
  CHECK(reparsed.stats.num_graphs == original.stats.num_graphs);
  CHECK(reparsed.stats.avg_nodes == original.stats.avg_nodes);
  CHECK(reparsed.stats.avg_edges == original.stats.avg_edges);
  CHECK(reparsed.stats.num_classes == original.stats.num_classes);
  CHECK(reparsed.stats.num_node_features == original.stats.num_node_features);
}

TEST_CASE("batch sizes follow the remainder rule") {
  const auto graphs = testutil::make_planted_dataset(5, 7);
  const auto batches = make_batches(graphs, 2, 99);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].num_graphs == 2);
  CHECK(batches[1].num_graphs == 2);
  CHECK(batches[2].num_graphs == 1);
}

TEST_CASE("batching is deterministic under the seed") {
  const auto graphs = testutil::make_planted_dataset(9, 7);
  const auto a = make_batches(graphs, 4, 123);
  const auto b = make_batches(graphs, 4, 123);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].labels == b[i].labels);
    CHECK(a[i].arc_src == b[i].arc_src);
    CHECK(a[i].node_to_graph == b[i].node_to_graph);
  }
}

TEST_CASE("batching preserves the multiset of labels") {
  const auto graphs = testutil::make_planted_dataset(11, 3);
  const auto batches = make_batches(graphs, 4, 17);
  std::multiset<int> seen, expected;
  for (const auto& g : graphs) expected.insert(g.label);
  for (const auto& b : batches)
    for (int l : b.labels) seen.insert(l);
  CHECK(seen == expected);
}

TEST_CASE("disjoint union offsets arcs and builds the indicator") {
  const TuDataset ds = parse_tu_dataset(kFixtureDir, "FIXTURE3");
  const GraphBatch batch = make_batch(ds.graphs, {0, 1});  // triangle + path
  CHECK(batch.num_nodes() == 7);
  CHECK(batch.node_to_graph == std::vector<std::size_t>{0, 0, 0, 1, 1, 1, 1});
  // The path's arcs are offset by the triangle's 3 nodes.
  CHECK(batch.arc_src[6] == 3);
  CHECK(batch.arc_dst[6] == 4);
  CHECK(batch.labels == std::vector<int>{0, 1});
}

TEST_CASE("undirected pairs partition the arc list") {
  const TuDataset ds = parse_tu_dataset(kFixtureDir, "FIXTURE3");
  const GraphBatch batch = make_batch(ds.graphs, {0, 1, 2});
  CHECK(batch.num_arcs() % 2 == 0);
  CHECK(batch.num_undirected_edges() == batch.num_arcs() / 2);
  std::vector<int> covered(batch.num_arcs(), 0);
  for (std::size_t e = 0; e < batch.num_undirected_edges(); ++e) {
    const auto [a1, a2] = batch.undirected_edge_pairs[e];
    CHECK(a1 != a2);
    // Reciprocal orientation.
    CHECK(batch.arc_src[a1] == batch.arc_dst[a2]);
    CHECK(batch.arc_dst[a1] == batch.arc_src[a2]);
    covered[a1] += 1;
    covered[a2] += 1;
    CHECK(batch.arc_edge_index[a1] == e);
    CHECK(batch.arc_edge_index[a2] == e);
  }
  for (int c : covered) CHECK(c == 1);
}

TEST_CASE("empty batch input is rejected") {
  CHECK_THROWS_AS(make_batches({}, 4, 1), ContractError);
}

TEST_CASE("balanced stratified folds") {
  const std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const auto folds = stratified_kfold(labels, 5, 42);
  REQUIRE(folds.size() == 5);
  for (const auto& fold : folds) {
    REQUIRE(fold.size() == 2);
    CHECK(labels[fold[0]] + labels[fold[1]] == 1);  // one of each class
  }
}

TEST_CASE("folds partition the index range") {
  const auto graphs = testutil::make_planted_dataset(23, 5);
  std::vector<int> labels;
  for (const auto& g : graphs) labels.push_back(g.label);
  for (std::size_t k : {2, 3, 7}) {
    const auto folds = stratified_kfold(labels, k, 9);
    std::set<std::size_t> all;
    std::size_t total = 0;
    for (const auto& fold : folds) {
      total += fold.size();
      all.insert(fold.begin(), fold.end());
    }
    CHECK(total == labels.size());       // pairwise disjoint given the union below
    CHECK(all.size() == labels.size());  // union covers everything
    // Per-class counts across folds differ by at most one.
    for (int cls : {0, 1}) {
      std::size_t lo = labels.size(), hi = 0;
      for (const auto& fold : folds) {
        std::size_t count = 0;
        for (std::size_t i : fold) count += labels[i] == cls ? 1 : 0;
        lo = std::min(lo, count);
        hi = std::max(hi, count);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("kfold is deterministic and validates k") {
  const std::vector<int> labels = {0, 1, 0, 1, 0, 1};
  CHECK(stratified_kfold(labels, 3, 7) == stratified_kfold(labels, 3, 7));
  CHECK_THROWS_AS(stratified_kfold(labels, 7, 1), ContractError);
  CHECK_THROWS_AS(stratified_kfold(labels, 1, 1), ContractError);
}

TEST_CASE("kfold falls back to unstratified when a class is tiny") {
  const std::vector<int> labels = {0, 0, 0, 0, 0, 1};  // class 1 has 1 member < k
  const auto folds = stratified_kfold(labels, 3, 11);
  std::set<std::size_t> all;
  for (const auto& fold : folds) all.insert(fold.begin(), fold.end());
  CHECK(all.size() == labels.size());
}
