#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hagcl/adam.hpp"
#include "hagcl/encoder.hpp"
#include "hagcl/graph.hpp"
#include "hagcl/objectives.hpp"
#include "hagcl/viewgen.hpp"

namespace hagcl {

enum class AugmentationMode { kAll, kEdgeOnly, kFeatureOnly };

std::string to_string(AugmentationMode mode);
AugmentationMode augmentation_mode_from_string(const std::string& s);

struct TrainConfig {
  int epochs = 20;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  AugmentationMode mode = AugmentationMode::kAll;
  double lr = 1e-3;  // shared by the encoder and both generators
  EncoderConfig encoder;
  GumbelConfig gumbel;
  LossConfig loss;
  int checkpoint_every = 0;  // epochs between checkpoints; 0 = final only
  std::string out_dir;       // empty = no files written
};

struct EpochMetrics {
  int epoch = 0;
  std::optional<double> min_loss_edge;
  std::optional<double> min_loss_feature;
  double max_loss = 0.0;
  std::optional<double> edge_drop_ratio;
  std::optional<double> feature_mask_ratio;
  double wall_seconds = 0.0;
};

// Joint alternating trainer.  Per minibatch:
//   1. embed the original batch and one view per generator;
//   2. per generator, an anchored-minimization step updating only that
//      generator (encoder gradients are discarded);
//   3. re-sample fresh views, draw one of the available unordered view
//      pairs uniformly, and run a pairwise-maximization step updating the
//      encoder plus every generator whose view participates.
class Trainer {
public:
  Trainer(std::size_t feature_dim, const TrainConfig& cfg);

  EpochMetrics train_epoch(const std::vector<GraphBatch>& batches, int epoch_index);

  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  const GinEncoder& encoder() const { return *encoder_; }
  const TrainConfig& config() const { return cfg_; }
  bool has_edge_generator() const { return edge_gen_ != nullptr; }
  bool has_feature_generator() const { return feat_gen_ != nullptr; }

  // Building blocks, exposed so the steps can be exercised in isolation.
  struct Views {
    Value z_original;
    std::optional<EdgeKeepSample> edge_sample;
    std::optional<Value> z_edge;
    std::optional<NodeMaskSample> feature_sample;
    std::optional<Value> z_feature;
  };
  Value encode_original(const GraphBatch& batch);
  // Samples one view per active generator and embeds it; z_original is
  // reused as-is.
  Views make_views(const GraphBatch& batch, Value z_original, int epoch_index,
                   std::size_t batch_index, int pass);
  double min_step_edge(const Views& views, std::size_t batch_index);
  double min_step_feature(const Views& views, std::size_t batch_index);
  struct MaxStepResult {
    double loss = 0.0;
    std::size_t pair_index = 0;  // order: (z0,z1), (z0,z2), (z1,z2) when all exist
  };
  // Draws the pair uniformly, then updates the encoder plus the generators
  // whose views participate.
  MaxStepResult max_step(const Views& fresh_views, int epoch_index, std::size_t batch_index);
  MaxStepResult max_step_on_pair(const Views& fresh_views, std::size_t pair_index,
                                 std::size_t batch_index);
  std::size_t num_view_pairs() const;

private:
  TrainConfig cfg_;
  ParamStore store_;
  std::unique_ptr<GinEncoder> encoder_;
  std::unique_ptr<EdgeViewGenerator> edge_gen_;
  std::unique_ptr<FeatureViewGenerator> feat_gen_;
  std::unique_ptr<AdamOptimizer> opt_encoder_;
  std::unique_ptr<AdamOptimizer> opt_edge_;
  std::unique_ptr<AdamOptimizer> opt_feature_;
};

struct PretrainResult {
  std::shared_ptr<Trainer> trainer;
  std::vector<EpochMetrics> metrics;
};

// The outer loop: shuffled minibatches per epoch, metrics every epoch,
// checkpoints at the configured cadence (plus a final one) when an output
// directory is set.  Deterministic under cfg.seed; labels are never read.
PretrainResult pretrain(const std::vector<Graph>& graphs, const TrainConfig& cfg);

}  // namespace hagcl
