#include "hagcl/viewgen.hpp"

#include <algorithm>
#include <cmath>

#include "hagcl/error.hpp"
#include "hagcl/rng.hpp"

namespace hagcl {

namespace {

double gumbel_noise(std::uint64_t seed, std::uint64_t counter) {
  double u = rng::uniform(seed, counter);
  u = std::clamp(u, 1e-12, 1.0 - 1e-12);
  return -std::log(-std::log(u));
}

}  // namespace

Value gumbel_softmax_sample(const Value& logits, const GumbelConfig& cfg, std::uint64_t rng_seed) {
  if (cfg.temperature <= 0.0)
    throw ContractError("gumbel_softmax_sample: temperature must be positive");
  const Array& l = logits.data();
  if (l.rank() != 2 || l.shape()[1] != 2)
    throw ShapeError("gumbel_softmax_sample: expected [n x 2] logits, got " + l.shape_str());
  const std::size_t n = l.shape()[0];

  // Per-logit Gumbel draws; row i uses counters 2i (keep) and 2i+1 (drop).
  // With two categories the softmax keep component reduces to a sigmoid of
  // the perturbed logit difference.
  Array noise_diff({n});
  for (std::size_t i = 0; i < n; ++i)
    noise_diff[i] = gumbel_noise(rng_seed, 2 * i) - gumbel_noise(rng_seed, 2 * i + 1);

  const Value diff = sub(select_col(logits, 0), select_col(logits, 1));
  const Value perturbed = mul(add(diff, Value::constant(std::move(noise_diff))),
                              Value::scalar(1.0 / cfg.temperature));
  const Value soft = sigmoid(perturbed);
  if (!cfg.hard) return soft;

  Array hard({n});
  for (std::size_t i = 0; i < n; ++i) hard[i] = soft.data()[i] >= 0.5 ? 1.0 : 0.0;
  return straight_through(soft, std::move(hard));
}

EdgeViewGenerator::EdgeViewGenerator(ParamStore& store, const std::string& prefix,
                                     std::size_t input_dim, const EncoderConfig& cfg,
                                     std::uint64_t init_seed)
    : gin_(store, prefix + ".gin", input_dim, cfg, rng::derive(init_seed, 1)),
      head_(make_mlp(store, prefix + ".head", 2 * cfg.hidden_dim, cfg.hidden_dim, 2,
                     rng::derive(init_seed, 2))) {}

EdgeKeepSample EdgeViewGenerator::generate(const GraphBatch& batch, const GumbelConfig& cfg,
                                           std::uint64_t seed, Mode mode) const {
  EdgeKeepSample sample;
  if (batch.num_undirected_edges() == 0) return sample;

  const LayerActivations acts = gin_.forward(batch, std::nullopt, std::nullopt, mode);
  const Value& agg = acts.a.back();

  // Canonical endpoint order: smaller node index first.
  std::vector<std::size_t> lo(batch.num_undirected_edges()), hi(batch.num_undirected_edges());
  for (std::size_t e = 0; e < batch.num_undirected_edges(); ++e) {
    const std::size_t arc = batch.undirected_edge_pairs[e][0];
    lo[e] = std::min(batch.arc_src[arc], batch.arc_dst[arc]);
    hi[e] = std::max(batch.arc_src[arc], batch.arc_dst[arc]);
  }
  const Value edge_embed = concat_cols(gather_rows(agg, lo), gather_rows(agg, hi));
  const Value logits = mlp(head_, edge_embed, mode);

  sample.keep_per_edge = gumbel_softmax_sample(logits, cfg, seed);
  sample.arc_weights = gather_rows(sample.keep_per_edge, batch.arc_edge_index);
  sample.drop_ratio = 1.0 - sample.keep_per_edge.data().mean();
  sample.empty = false;
  return sample;
}

FeatureViewGenerator::FeatureViewGenerator(ParamStore& store, const std::string& prefix,
                                           std::size_t input_dim, const EncoderConfig& cfg,
                                           std::uint64_t init_seed)
    : gin_(store, prefix + ".gin", input_dim, cfg, rng::derive(init_seed, 1)),
      head_(make_mlp(store, prefix + ".head", cfg.hidden_dim, cfg.hidden_dim, 2,
                     rng::derive(init_seed, 2))) {}

NodeMaskSample FeatureViewGenerator::generate(const GraphBatch& batch, const GumbelConfig& cfg,
                                              std::uint64_t seed, Mode mode) const {
  const LayerActivations acts = gin_.forward(batch, std::nullopt, std::nullopt, mode);
  const Value logits = mlp(head_, acts.a.back(), mode);
  NodeMaskSample sample;
  sample.keep_mask = gumbel_softmax_sample(logits, cfg, seed);
  sample.mask_ratio = 1.0 - sample.keep_mask.data().mean();
  return sample;
}

}  // namespace hagcl
