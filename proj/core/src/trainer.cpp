#include "hagcl/trainer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "hagcl/checkpoint.hpp"
#include "hagcl/error.hpp"
#include "hagcl/metrics.hpp"
#include "hagcl/rng.hpp"

namespace hagcl {

std::string to_string(AugmentationMode mode) {
  switch (mode) {
    case AugmentationMode::kAll:
      return "all";
    case AugmentationMode::kEdgeOnly:
      return "edge_only";
    case AugmentationMode::kFeatureOnly:
      return "feature_only";
  }
  return "all";
}

AugmentationMode augmentation_mode_from_string(const std::string& s) {
  if (s == "all") return AugmentationMode::kAll;
  if (s == "edge_only") return AugmentationMode::kEdgeOnly;
  if (s == "feature_only") return AugmentationMode::kFeatureOnly;
  throw ConfigError("unknown augmentation mode '" + s +
                    "' (expected all, edge_only or feature_only)");
}

namespace {

void check_finite(double loss, const char* what, std::size_t batch_index) {
  if (!std::isfinite(loss))
    throw NumericError(std::string("train_epoch: non-finite ") + what + " at batch " +
                       std::to_string(batch_index));
}

}  // namespace

Trainer::Trainer(std::size_t feature_dim, const TrainConfig& cfg) : cfg_(cfg) {
  if (cfg.epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("TrainConfig: batch_size must be >= 1");
  if (cfg.lr <= 0.0) throw ConfigError("TrainConfig: lr must be positive");

  const std::uint64_t init_seed = rng::derive(cfg.seed, rng::stream::kParamInit);
  encoder_ = std::make_unique<GinEncoder>(store_, "encoder", feature_dim, cfg.encoder,
                                          rng::derive(init_seed, 1));
  if (cfg.mode != AugmentationMode::kFeatureOnly)
    edge_gen_ = std::make_unique<EdgeViewGenerator>(store_, "edge_gen", feature_dim, cfg.encoder,
                                                    rng::derive(init_seed, 2));
  if (cfg.mode != AugmentationMode::kEdgeOnly)
    feat_gen_ = std::make_unique<FeatureViewGenerator>(store_, "feat_gen", feature_dim,
                                                       cfg.encoder, rng::derive(init_seed, 3));

  AdamConfig adam{cfg.lr, 0.9, 0.999, 1e-8};
  opt_encoder_ = std::make_unique<AdamOptimizer>(store_.trainable_values("encoder."), adam);
  if (edge_gen_)
    opt_edge_ = std::make_unique<AdamOptimizer>(store_.trainable_values("edge_gen."), adam);
  if (feat_gen_)
    opt_feature_ = std::make_unique<AdamOptimizer>(store_.trainable_values("feat_gen."), adam);
}

Value Trainer::encode_original(const GraphBatch& batch) {
  return encoder_->encode_graphs(batch, std::nullopt, std::nullopt, Mode::kTrain);
}

Trainer::Views Trainer::make_views(const GraphBatch& batch, Value z_original, int epoch_index,
                                   std::size_t batch_index, int pass) {
  Views views;
  views.z_original = std::move(z_original);
  const auto idx = static_cast<std::uint64_t>(batch_index) * 2 + static_cast<std::uint64_t>(pass);
  if (edge_gen_) {
    EdgeKeepSample sample = edge_gen_->generate(
        batch, cfg_.gumbel,
        rng::derive(cfg_.seed, rng::stream::kGumbelEdge, static_cast<std::uint64_t>(epoch_index),
                    idx),
        Mode::kTrain);
    std::optional<Value> arc_weights;
    if (!sample.empty) arc_weights = sample.arc_weights;
    views.z_edge = encoder_->encode_graphs(batch, arc_weights, std::nullopt, Mode::kTrain);
    views.edge_sample = std::move(sample);
  }
  if (feat_gen_) {
    NodeMaskSample sample = feat_gen_->generate(
        batch, cfg_.gumbel,
        rng::derive(cfg_.seed, rng::stream::kGumbelFeature,
                    static_cast<std::uint64_t>(epoch_index), idx),
        Mode::kTrain);
    views.z_feature =
        encoder_->encode_graphs(batch, std::nullopt, sample.keep_mask, Mode::kTrain);
    views.feature_sample = std::move(sample);
  }
  return views;
}

double Trainer::min_step_edge(const Views& views, std::size_t batch_index) {
  if (!edge_gen_) throw ContractError("min_step_edge: no edge generator in this mode");
  std::optional<Value> extra;
  if (cfg_.loss.pooled_min_negatives && views.z_feature) extra = views.z_feature;
  const Value loss = info_nce_anchor(views.z_original, *views.z_edge, cfg_.loss, extra);
  check_finite(loss.data()[0], "anchored loss (edge generator)", batch_index);
  backward(loss);
  opt_edge_->step();  // encoder and feature-generator gradients are discarded
  return loss.data()[0];
}

double Trainer::min_step_feature(const Views& views, std::size_t batch_index) {
  if (!feat_gen_) throw ContractError("min_step_feature: no feature generator in this mode");
  std::optional<Value> extra;
  if (cfg_.loss.pooled_min_negatives && views.z_edge) extra = views.z_edge;
  const Value loss = info_nce_anchor(views.z_original, *views.z_feature, cfg_.loss, extra);
  check_finite(loss.data()[0], "anchored loss (feature generator)", batch_index);
  backward(loss);
  opt_feature_->step();
  return loss.data()[0];
}

std::size_t Trainer::num_view_pairs() const {
  return edge_gen_ && feat_gen_ ? 3 : 1;
}

Trainer::MaxStepResult Trainer::max_step(const Views& fresh, int epoch_index,
                                         std::size_t batch_index) {
  const std::uint64_t counter = rng::derive(static_cast<std::uint64_t>(epoch_index), 0x70ull,
                                            static_cast<std::uint64_t>(batch_index));
  const std::size_t choice = static_cast<std::size_t>(
      rng::bounded(rng::derive(cfg_.seed, rng::stream::kPairSample), counter, num_view_pairs()));
  return max_step_on_pair(fresh, choice, batch_index);
}

Trainer::MaxStepResult Trainer::max_step_on_pair(const Views& fresh, std::size_t pair_index,
                                                 std::size_t batch_index) {
  struct Candidate {
    const Value* a;
    const Value* b;
    bool uses_edge;
    bool uses_feature;
  };
  std::vector<Candidate> pairs;
  if (fresh.z_edge) pairs.push_back({&fresh.z_original, &*fresh.z_edge, true, false});
  if (fresh.z_feature) pairs.push_back({&fresh.z_original, &*fresh.z_feature, false, true});
  if (fresh.z_edge && fresh.z_feature)
    pairs.push_back({&*fresh.z_edge, &*fresh.z_feature, true, true});
  if (pairs.empty()) throw ContractError("max_step: no generator views available");
  if (pair_index >= pairs.size()) throw ContractError("max_step: pair index out of range");
  const Candidate& pair = pairs[pair_index];

  const Value loss = info_nce_pair(*pair.a, *pair.b, cfg_.loss);
  check_finite(loss.data()[0], "pairwise loss", batch_index);
  backward(loss);
  opt_encoder_->step();
  if (pair.uses_edge) opt_edge_->step();
  if (pair.uses_feature) opt_feature_->step();
  return {loss.data()[0], pair_index};
}

EpochMetrics Trainer::train_epoch(const std::vector<GraphBatch>& batches, int epoch_index) {
  if (batches.empty()) throw ContractError("train_epoch: no batches");
  const auto start = std::chrono::steady_clock::now();

  double sum_min_edge = 0.0, sum_min_feature = 0.0, sum_max = 0.0;
  double sum_drop = 0.0, sum_mask = 0.0;
  std::size_t drop_samples = 0, mask_samples = 0;

  for (std::size_t b = 0; b < batches.size(); ++b) {
    const GraphBatch& batch = batches[b];
    Value z0 = encode_original(batch);
    Views views = make_views(batch, z0, epoch_index, b, /*pass=*/0);
    if (edge_gen_) sum_min_edge += min_step_edge(views, b);
    if (feat_gen_) sum_min_feature += min_step_feature(views, b);

    // Fresh samples for the maximization step; the original embedding is
    // reused from the first pass.
    Views fresh = make_views(batch, z0, epoch_index, b, /*pass=*/1);
    sum_max += max_step(fresh, epoch_index, b).loss;

    for (const Views* v : {&views, &fresh}) {
      if (v->edge_sample && !v->edge_sample->empty) {
        sum_drop += v->edge_sample->drop_ratio;
        ++drop_samples;
      }
      if (v->feature_sample) {
        sum_mask += v->feature_sample->mask_ratio;
        ++mask_samples;
      }
    }
  }

  const double n = static_cast<double>(batches.size());
  EpochMetrics m;
  m.epoch = epoch_index;
  if (edge_gen_) m.min_loss_edge = sum_min_edge / n;
  if (feat_gen_) m.min_loss_feature = sum_min_feature / n;
  m.max_loss = sum_max / n;
  if (drop_samples > 0) m.edge_drop_ratio = sum_drop / static_cast<double>(drop_samples);
  if (mask_samples > 0) m.feature_mask_ratio = sum_mask / static_cast<double>(mask_samples);
  m.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return m;
}

PretrainResult pretrain(const std::vector<Graph>& graphs, const TrainConfig& cfg) {
  if (graphs.empty()) throw ContractError("pretrain: no graphs");
  PretrainResult result;
  result.trainer = std::make_shared<Trainer>(graphs[0].feature_dim(), cfg);

  const bool write_files = !cfg.out_dir.empty();
  std::unique_ptr<MetricsWriter> writer;
  if (write_files) {
    std::filesystem::create_directories(cfg.out_dir);
    writer = std::make_unique<MetricsWriter>(cfg.out_dir + "/metrics.jsonl");
  }

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto batches = make_batches(
        graphs, cfg.batch_size,
        rng::derive(cfg.seed, rng::stream::kBatchShuffle, static_cast<std::uint64_t>(epoch)));
    EpochMetrics metrics = result.trainer->train_epoch(batches, epoch);
    if (writer) writer->append(metrics);
    result.metrics.push_back(metrics);
    if (write_files && cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0)
      save_checkpoint(result.trainer->params(),
                      cfg.out_dir + "/checkpoint_epoch" + std::to_string(epoch + 1) + ".bin");
  }
  if (write_files)
    save_checkpoint(result.trainer->params(), cfg.out_dir + "/checkpoint_final.bin");
  return result;
}

}  // namespace hagcl
