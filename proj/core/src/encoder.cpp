#include "hagcl/encoder.hpp"

#include <cmath>

#include "hagcl/error.hpp"
#include "hagcl/rng.hpp"

namespace hagcl {

namespace {

constexpr double kBnEpsilon = 1e-5;
constexpr double kBnMomentum = 0.1;

// Eval-mode forwards run against frozen copies so no gradients are tracked.
Value maybe_frozen(const Value& v, Mode mode) {
  return mode == Mode::kEval ? Value::constant(v.data()) : v;
}

}  // namespace

Value linear(const LinearParams& p, const Value& x, Mode mode) {
  return add_rowvec(matmul(x, maybe_frozen(p.weight, mode)), maybe_frozen(p.bias, mode));
}

Value mlp(const MlpParams& p, const Value& x, Mode mode) {
  return linear(p.second, relu(linear(p.first, x, mode)), mode);
}

Value batch_norm(const BatchNormParams& p, const Value& x, Mode mode) {
  const std::size_t n = x.data().rows();
  const std::size_t d = x.data().row_size();
  if (mode == Mode::kEval) {
    const Value mean = Value::constant(p.running_mean.data());
    const Value inv_std =
        div(Value::scalar(1.0), sqrt(add(Value::constant(p.running_var.data()),
                                         Value::scalar(kBnEpsilon))));
    const Value centered = add_rowvec(x, neg(mean));
    return add_rowvec(mul_rowvec(mul_rowvec(centered, inv_std), Value::constant(p.scale.data())),
                      Value::constant(p.shift.data()));
  }

  const std::vector<std::size_t> all_zero(n, 0);
  const Value inv_n = Value::scalar(1.0 / static_cast<double>(n));
  const Value mean = mul(segment_sum(x, all_zero, 1), inv_n);  // [1 x d]
  const Value centered = add_rowvec(x, neg(mean));
  const Value var = mul(segment_sum(mul(centered, centered), all_zero, 1), inv_n);
  const Value inv_std = div(Value::scalar(1.0), sqrt(add(var, Value::scalar(kBnEpsilon))));
  const Value out =
      add_rowvec(mul_rowvec(mul_rowvec(centered, inv_std), p.scale), p.shift);

  // Refresh running statistics from the batch (values only, no gradient).
  Array& rm = const_cast<Value&>(p.running_mean).mutable_data();
  Array& rv = const_cast<Value&>(p.running_var).mutable_data();
  for (std::size_t c = 0; c < d; ++c) {
    rm[c] = (1.0 - kBnMomentum) * rm[c] + kBnMomentum * mean.data()[c];
    rv[c] = (1.0 - kBnMomentum) * rv[c] + kBnMomentum * var.data()[c];
  }
  return out;
}

LinearParams make_linear(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                         std::size_t out_dim, std::uint64_t init_seed) {
  Array w({in_dim, out_dim});
  const double bound = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = rng::uniform_in(init_seed, i, -bound, bound);
  LinearParams p;
  p.weight = store.add(prefix + ".weight", std::move(w));
  p.bias = store.add(prefix + ".bias", Array({out_dim}));
  return p;
}

MlpParams make_mlp(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                   std::size_t hidden_dim, std::size_t out_dim, std::uint64_t init_seed) {
  MlpParams p;
  p.first = make_linear(store, prefix + ".lin1", in_dim, hidden_dim, rng::derive(init_seed, 1));
  p.second = make_linear(store, prefix + ".lin2", hidden_dim, out_dim, rng::derive(init_seed, 2));
  return p;
}

BatchNormParams make_batch_norm(ParamStore& store, const std::string& prefix, std::size_t dim) {
  BatchNormParams p;
  p.scale = store.add(prefix + ".scale", Array({dim}, 1.0));
  p.shift = store.add(prefix + ".shift", Array({dim}));
  p.running_mean = store.add(prefix + ".running_mean", Array({dim}), /*trainable=*/false);
  p.running_var = store.add(prefix + ".running_var", Array({dim}, 1.0), /*trainable=*/false);
  return p;
}

GinStack::GinStack(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                   const EncoderConfig& cfg, std::uint64_t init_seed)
    : cfg_(cfg), input_dim_(input_dim) {
  if (cfg.num_layers < 1 || cfg.hidden_dim < 1 || cfg.embedding_dim < 1 || input_dim < 1)
    throw ConfigError("GinStack: layers and dimensions must be >= 1");
  layers_.reserve(cfg.num_layers);
  for (std::size_t k = 1; k <= cfg.num_layers; ++k) {
    const std::size_t in_dim = k == 1 ? input_dim : cfg.hidden_dim;
    const std::string layer_prefix = prefix + ".layer" + std::to_string(k);
    Layer layer;
    layer.mlp = make_mlp(store, layer_prefix, in_dim, cfg.hidden_dim, cfg.hidden_dim,
                         rng::derive(init_seed, k));
    if (cfg.use_batch_norm)
      layer.bn = make_batch_norm(store, layer_prefix + ".bn", cfg.hidden_dim);
    layers_.push_back(std::move(layer));
  }
}

LayerActivations GinStack::forward(const GraphBatch& batch,
                                   const std::optional<Value>& arc_weights,
                                   const std::optional<Value>& node_feature_mask,
                                   Mode mode) const {
  if (batch.node_features.row_size() != input_dim_)
    throw ShapeError("GinStack: batch feature dim " +
                     std::to_string(batch.node_features.row_size()) + " != expected " +
                     std::to_string(input_dim_));
  if (arc_weights && arc_weights->size() != batch.num_arcs())
    throw ContractError("GinStack: " + std::to_string(arc_weights->size()) +
                        " arc weights for " + std::to_string(batch.num_arcs()) + " arcs");
  if (node_feature_mask && node_feature_mask->size() != batch.num_nodes())
    throw ContractError("GinStack: " + std::to_string(node_feature_mask->size()) +
                        " mask entries for " + std::to_string(batch.num_nodes()) + " nodes");

  LayerActivations acts;
  Value h0 = Value::constant(batch.node_features);
  if (node_feature_mask) h0 = scale_rows(h0, *node_feature_mask);
  acts.h.push_back(h0);

  for (const Layer& layer : layers_) {
    const Value& prev = acts.h.back();
    Value gathered = gather_rows(prev, batch.arc_src);
    if (arc_weights) gathered = scale_rows(gathered, *arc_weights);
    Value agg = segment_sum(gathered, batch.arc_dst, batch.num_nodes());
    Value combined =
        cfg_.gin_epsilon == 0.0
            ? add(prev, agg)
            : add(mul(prev, Value::scalar(1.0 + cfg_.gin_epsilon)), agg);
    Value out = mlp(layer.mlp, combined, mode);
    if (layer.bn) out = batch_norm(*layer.bn, out, mode);
    acts.a.push_back(std::move(agg));
    acts.h.push_back(std::move(out));
  }
  return acts;
}

GinEncoder::GinEncoder(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                       const EncoderConfig& cfg, std::uint64_t init_seed)
    : gin_(store, prefix + ".gin", input_dim, cfg, rng::derive(init_seed, 1)),
      projection_(make_mlp(store, prefix + ".proj", cfg.hidden_dim, cfg.hidden_dim,
                           cfg.embedding_dim, rng::derive(init_seed, 2))) {}

LayerActivations GinEncoder::encode_nodes(const GraphBatch& batch,
                                          const std::optional<Value>& arc_weights,
                                          Mode mode) const {
  return gin_.forward(batch, arc_weights, std::nullopt, mode);
}

Value GinEncoder::encode_graphs(const GraphBatch& batch, const std::optional<Value>& arc_weights,
                                const std::optional<Value>& node_feature_mask, Mode mode) const {
  LayerActivations acts = gin_.forward(batch, arc_weights, node_feature_mask, mode);
  Value pooled = segment_sum(acts.h.back(), batch.node_to_graph, batch.num_graphs);
  return mlp(projection_, pooled, mode);
}

}  // namespace hagcl
