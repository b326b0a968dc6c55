#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hagcl/graph.hpp"
#include "hagcl/ops.hpp"
#include "hagcl/params.hpp"

namespace hagcl {

enum class Mode { kTrain, kEval };

struct EncoderConfig {
  std::size_t num_layers = 5;
  std::size_t hidden_dim = 32;
  std::size_t embedding_dim = 32;
  double gin_epsilon = 0.0;  // fixed, non-learnable
  bool use_batch_norm = true;
};

struct LinearParams {
  Value weight;  // [in x out]
  Value bias;    // [out]
};

struct MlpParams {
  LinearParams first;
  LinearParams second;
};

struct BatchNormParams {
  Value scale;
  Value shift;
  Value running_mean;
  Value running_var;
};

Value linear(const LinearParams& p, const Value& x, Mode mode);
// Linear -> ReLU -> Linear.
Value mlp(const MlpParams& p, const Value& x, Mode mode);
// Train mode normalizes with batch statistics and refreshes the running
// ones; eval mode applies the running statistics as constants.
Value batch_norm(const BatchNormParams& p, const Value& x, Mode mode);

// Parameter registration, Glorot-uniform weights, zero biases.
LinearParams make_linear(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                         std::size_t out_dim, std::uint64_t init_seed);
MlpParams make_mlp(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                   std::size_t hidden_dim, std::size_t out_dim, std::uint64_t init_seed);
BatchNormParams make_batch_norm(ParamStore& store, const std::string& prefix, std::size_t dim);

struct LayerActivations {
  std::vector<Value> h;  // h[0..K]; h[0] is the (optionally masked) input
  std::vector<Value> a;  // aggregation per layer; a[k-1] feeds layer k
};

// K message-passing layers with weighted sum aggregation:
//   a_k[v]  = sum over arcs (u -> v) of w_arc * h_{k-1}[u]
//   h_k     = MLP_k((1 + eps) * h_{k-1} + a_k), then batch norm when enabled.
// Arc weights default to 1; a node feature mask multiplies input rows ahead
// of layer 0.
class GinStack {
public:
  GinStack(ParamStore& store, const std::string& prefix, std::size_t input_dim,
           const EncoderConfig& cfg, std::uint64_t init_seed);

  LayerActivations forward(const GraphBatch& batch, const std::optional<Value>& arc_weights,
                           const std::optional<Value>& node_feature_mask, Mode mode) const;

  const EncoderConfig& config() const { return cfg_; }
  std::size_t input_dim() const { return input_dim_; }

private:
  struct Layer {
    MlpParams mlp;
    std::optional<BatchNormParams> bn;
  };
  EncoderConfig cfg_;
  std::size_t input_dim_ = 0;
  std::vector<Layer> layers_;
};

// The encoder f: a GIN stack plus a graph-level projection MLP over sum
// pooling of the last layer's node embeddings.
class GinEncoder {
public:
  GinEncoder(ParamStore& store, const std::string& prefix, std::size_t input_dim,
             const EncoderConfig& cfg, std::uint64_t init_seed);

  LayerActivations encode_nodes(const GraphBatch& batch, const std::optional<Value>& arc_weights,
                                Mode mode) const;

  // z_g per graph: [num_graphs x embedding_dim].
  Value encode_graphs(const GraphBatch& batch, const std::optional<Value>& arc_weights,
                      const std::optional<Value>& node_feature_mask, Mode mode) const;

  const GinStack& stack() const { return gin_; }

private:
  GinStack gin_;
  MlpParams projection_;
};

}  // namespace hagcl
