#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hagcl/encoder.hpp"
#include "hagcl/graph.hpp"
#include "hagcl/params.hpp"

namespace hagcl {

struct GumbelConfig {
  double temperature = 1.0;
  bool hard = true;  // straight-through: one-hot forward, soft gradient
};

// Per-row binary sample over (keep, drop) logits.
//
// Noise is counter-based per row index: element i always draws the same
// Gumbel pair under a given seed, independent of the other rows.  Returns
// the keep-category component, in [0,1] (exactly {0,1} when hard).
Value gumbel_softmax_sample(const Value& logits, const GumbelConfig& cfg, std::uint64_t rng_seed);

// Keep decisions per undirected edge; both reciprocal arcs share one draw.
struct EdgeKeepSample {
  Value keep_per_edge;  // [num_undirected_edges]
  Value arc_weights;    // [num_arcs], gathered from keep_per_edge
  double drop_ratio = 0.0;
  bool empty = true;
};

// Keep decisions per node; a dropped node's feature row becomes zero.
struct NodeMaskSample {
  Value keep_mask;  // [num_nodes]
  double mask_ratio = 0.0;
};

// Edge-level view generator: its own GIN embedder plus a 2-logit head over
// concatenated endpoint embeddings (smaller node index first).
class EdgeViewGenerator {
public:
  EdgeViewGenerator(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                    const EncoderConfig& cfg, std::uint64_t init_seed);

  EdgeKeepSample generate(const GraphBatch& batch, const GumbelConfig& cfg, std::uint64_t seed,
                          Mode mode) const;

  const MlpParams& head() const { return head_; }

private:
  GinStack gin_;
  MlpParams head_;  // [2*hidden] -> hidden -> 2 logits (keep, drop)
};

// Feature-level view generator: per-node 2-logit head over the node's final
// aggregation vector.
class FeatureViewGenerator {
public:
  FeatureViewGenerator(ParamStore& store, const std::string& prefix, std::size_t input_dim,
                       const EncoderConfig& cfg, std::uint64_t init_seed);

  NodeMaskSample generate(const GraphBatch& batch, const GumbelConfig& cfg, std::uint64_t seed,
                          Mode mode) const;

  const MlpParams& head() const { return head_; }

private:
  GinStack gin_;
  MlpParams head_;  // [hidden] -> hidden -> 2 logits (keep, drop)
};

}  // namespace hagcl
