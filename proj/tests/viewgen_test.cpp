#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hagcl/encoder.hpp"
#include "hagcl/error.hpp"
#include "hagcl/viewgen.hpp"
#include "testutil.hpp"

using namespace hagcl;

namespace {

EncoderConfig small_config() {
  EncoderConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden_dim = 6;
  cfg.embedding_dim = 5;
  cfg.use_batch_norm = false;
  return cfg;
}

GraphBatch two_graph_batch() {
  Graph tri;
  tri.node_features = testutil::random_array({3, 2}, 71);
  tri.arcs = {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {0, 2}, {2, 0}};
  Graph path;
  path.node_features = testutil::random_array({4, 2}, 72);
  path.arcs = {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}};
  return make_batch({tri, path}, {0, 1});
}

// Pins the head output to fixed logits by zeroing its final weight matrix.
void force_head_logits(ParamStore& store, const std::string& head_prefix, double keep_logit,
                       double drop_logit) {
  store.get(head_prefix + ".lin2.weight").mutable_data().fill(0.0);
  Array& bias = store.get(head_prefix + ".lin2.bias").mutable_data();
  bias[0] = keep_logit;
  bias[1] = drop_logit;
}

}  // namespace

TEST_CASE("saturated logits pin the keep component") {
  const std::size_t n = 10000;
  Array logits({n, 2});
  for (std::size_t i = 0; i < n; ++i) {
    logits.at(i, 0) = 50.0;
    logits.at(i, 1) = 0.0;
  }
  const Value sample = gumbel_softmax_sample(Value::constant(logits), {1.0, true}, 1234);
  std::size_t keeps = 0;
  for (std::size_t i = 0; i < n; ++i) keeps += sample.data()[i] == 1.0 ? 1 : 0;
  CHECK(keeps >= 9999);
}

TEST_CASE("balanced logits sample keep about half the time") {
  const std::size_t n = 10000;
  const Value logits = Value::constant(Array({n, 2}, 0.0));
  const Value sample = gumbel_softmax_sample(logits, {1.0, true}, 99);
  CHECK(sample.data().mean() == doctest::Approx(0.5).epsilon(0.04));  // 0.5 +/- 0.02
}

TEST_CASE("empirical keep frequency tracks the softmax probability") {
  const std::size_t n = 10000;
  for (const auto& [keep_logit, drop_logit] : std::vector<std::pair<double, double>>{
           {1.0, 0.0}, {-0.5, 0.5}, {2.0, 1.0}}) {
    Array logits({n, 2});
    for (std::size_t i = 0; i < n; ++i) {
      logits.at(i, 0) = keep_logit;
      logits.at(i, 1) = drop_logit;
    }
    const Value sample =
        gumbel_softmax_sample(Value::constant(logits), {1.0, true},
                              rng::derive(7, static_cast<std::uint64_t>(keep_logit * 8 + 16)));
    const double p = 1.0 / (1.0 + std::exp(-(keep_logit - drop_logit)));
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    CHECK(std::abs(sample.data().mean() - p) < 3.0 * se);
  }
}

TEST_CASE("hard samples are exactly one-hot") {
  const Value logits = Value::constant(testutil::random_array({64, 2}, 81));
  const Value keep = gumbel_softmax_sample(logits, {1.0, true}, 82);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const double k = keep.data()[i];
    CHECK((k == 0.0 || k == 1.0));
    CHECK(k + (1.0 - k) == 1.0);  // keep + drop components normalize exactly
  }
}

TEST_CASE("temperature must be positive") {
  const Value logits = Value::constant(Array({3, 2}));
  CHECK_THROWS_AS(gumbel_softmax_sample(logits, {0.0, true}, 1), ContractError);
  CHECK_THROWS_AS(gumbel_softmax_sample(logits, {-1.0, true}, 1), ContractError);
}

TEST_CASE("same seed reproduces the sample bit-exactly") {
  const Value logits = Value::constant(testutil::random_array({40, 2}, 83));
  const Value a = gumbel_softmax_sample(logits, {0.7, false}, 4242);
  const Value b = gumbel_softmax_sample(logits, {0.7, false}, 4242);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("forced keep bias gives an identity edge view") {
  ParamStore store;
  EdgeViewGenerator gen(store, "edge_gen", 2, small_config(), 91);
  force_head_logits(store, "edge_gen.head", 50.0, 0.0);
  const GraphBatch batch = two_graph_batch();
  const EdgeKeepSample sample = gen.generate(batch, {1.0, true}, 11, Mode::kTrain);
  REQUIRE_FALSE(sample.empty);
  CHECK(sample.drop_ratio == 0.0);
  for (std::size_t a = 0; a < batch.num_arcs(); ++a) CHECK(sample.arc_weights.data()[a] == 1.0);
}

TEST_CASE("forced drop bias removes every edge") {
  ParamStore store;
  EdgeViewGenerator gen(store, "edge_gen", 2, small_config(), 92);
  force_head_logits(store, "edge_gen.head", 0.0, 50.0);
  const EdgeKeepSample sample = gen.generate(two_graph_batch(), {1.0, true}, 12, Mode::kTrain);
  CHECK(sample.drop_ratio == 1.0);
}

TEST_CASE("both arcs of an undirected edge share one keep weight") {
  ParamStore store;
  EdgeViewGenerator gen(store, "edge_gen", 2, small_config(), 93);
  const GraphBatch batch = two_graph_batch();
  const EdgeKeepSample sample = gen.generate(batch, {1.0, true}, 13, Mode::kTrain);
  for (std::size_t e = 0; e < batch.num_undirected_edges(); ++e) {
    const auto [a1, a2] = batch.undirected_edge_pairs[e];
    CHECK(sample.arc_weights.data()[a1] == sample.arc_weights.data()[a2]);
    CHECK(sample.arc_weights.data()[a1] == sample.keep_per_edge.data()[e]);
  }
}

TEST_CASE("edgeless batches give an empty sample") {
  Graph isolated;
  isolated.node_features = testutil::random_array({3, 2}, 94);
  ParamStore store;
  EdgeViewGenerator gen(store, "edge_gen", 2, small_config(), 95);
  const EdgeKeepSample sample =
      gen.generate(make_batch({isolated}, {0}), {1.0, true}, 14, Mode::kTrain);
  CHECK(sample.empty);
  CHECK(sample.drop_ratio == 0.0);
}

TEST_CASE("edge head gradients match finite differences under frozen noise") {
  ParamStore store;
  EdgeViewGenerator gen(store, "edge_gen", 2, small_config(), 96);
  const GraphBatch batch = two_graph_batch();
  const GumbelConfig soft{1.0, false};
  std::vector<Value> inputs = {
      store.get("edge_gen.head.lin1.weight"), store.get("edge_gen.head.lin1.bias"),
      store.get("edge_gen.head.lin2.weight"), store.get("edge_gen.head.lin2.bias")};
  const double err = testutil::gradient_check(
      [&] {
        const EdgeKeepSample s = gen.generate(batch, soft, 1717, Mode::kTrain);
        return mean_all(s.keep_per_edge);
      },
      inputs);
  CHECK(err < 1e-4);
}

TEST_CASE("straight-through gradients equal the soft gradients exactly") {
  ParamStore store;
  EdgeViewGenerator gen(store, "edge_gen", 2, small_config(), 97);
  const GraphBatch batch = two_graph_batch();
  const Value w = store.get("edge_gen.head.lin1.weight");

  backward(mean_all(gen.generate(batch, {1.0, false}, 33, Mode::kTrain).keep_per_edge));
  const Array soft_grad = w.grad();
  backward(mean_all(gen.generate(batch, {1.0, true}, 33, Mode::kTrain).keep_per_edge));
  for (std::size_t i = 0; i < soft_grad.size(); ++i) CHECK(w.grad()[i] == soft_grad[i]);
}

TEST_CASE("forced keep bias makes the feature view an identity") {
  ParamStore store;
  FeatureViewGenerator gen(store, "feat_gen", 2, small_config(), 98);
  GinEncoder enc(store, "encoder", 2, small_config(), 99);
  force_head_logits(store, "feat_gen.head", 50.0, 0.0);
  const GraphBatch batch = two_graph_batch();
  const NodeMaskSample sample = gen.generate(batch, {1.0, true}, 15, Mode::kTrain);
  CHECK(sample.mask_ratio == 0.0);

  const Value masked = enc.encode_graphs(batch, std::nullopt, sample.keep_mask, Mode::kTrain);
  const Value plain = enc.encode_graphs(batch, std::nullopt, std::nullopt, Mode::kTrain);
  for (std::size_t i = 0; i < masked.size(); ++i) CHECK(masked.data()[i] == plain.data()[i]);
}

TEST_CASE("forced mask bias zeroes every feature row") {
  ParamStore store;
  FeatureViewGenerator gen(store, "feat_gen", 2, small_config(), 100);
  GinEncoder enc(store, "encoder", 2, small_config(), 101);
  force_head_logits(store, "feat_gen.head", 0.0, 50.0);
  const GraphBatch batch = two_graph_batch();
  const NodeMaskSample sample = gen.generate(batch, {1.0, true}, 16, Mode::kTrain);
  CHECK(sample.mask_ratio == 1.0);

  GraphBatch zeroed = batch;
  zeroed.node_features.fill(0.0);
  const Value masked = enc.encode_graphs(batch, std::nullopt, sample.keep_mask, Mode::kTrain);
  const Value direct = enc.encode_graphs(zeroed, std::nullopt, std::nullopt, Mode::kTrain);
  for (std::size_t i = 0; i < masked.size(); ++i) CHECK(masked.data()[i] == direct.data()[i]);
}

TEST_CASE("feature head receives gradient through a dependent loss") {
  ParamStore store;
  FeatureViewGenerator gen(store, "feat_gen", 2, small_config(), 102);
  GinEncoder enc(store, "encoder", 2, small_config(), 103);
  const GraphBatch batch = two_graph_batch();

  const NodeMaskSample sample = gen.generate(batch, {1.0, true}, 17, Mode::kTrain);
  const Value z = enc.encode_graphs(batch, std::nullopt, sample.keep_mask, Mode::kTrain);
  backward(testutil::project(z, 104));
  double total = 0.0;
  const Value head_w = store.get("feat_gen.head.lin1.weight");
  for (std::size_t i = 0; i < head_w.grad().size(); ++i) total += std::abs(head_w.grad()[i]);
  CHECK(total > 0.0);
}

TEST_CASE("feature head gradients match finite differences under frozen noise") {
  ParamStore store;
  FeatureViewGenerator gen(store, "feat_gen", 2, small_config(), 105);
  const GraphBatch batch = two_graph_batch();
  const GumbelConfig soft{1.0, false};
  std::vector<Value> inputs = {store.get("feat_gen.head.lin1.weight"),
                               store.get("feat_gen.head.lin2.bias")};
  const double err = testutil::gradient_check(
      [&] {
        const NodeMaskSample s = gen.generate(batch, soft, 1818, Mode::kTrain);
        return mean_all(s.keep_mask);
      },
      inputs);
  CHECK(err < 1e-4);
}
