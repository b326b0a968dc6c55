#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hagcl/encoder.hpp"
#include "hagcl/graph.hpp"

namespace hagcl {

struct ProbeConfig {
  std::size_t num_folds = 10;
  std::size_t num_seeds = 5;
  std::vector<double> l2_grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
  double inner_val_fraction = 0.1;
  std::size_t max_iterations = 500;
  double tolerance = 1e-6;
  std::size_t embed_batch_size = 64;
};

// Multinomial logistic classifier with per-feature standardization fitted on
// its own training data.
struct LinearModel {
  Array feature_mean;  // [d]
  Array feature_std;   // [d]
  Array weights;       // [d x C]
  Array bias;          // [C]
  std::size_t num_classes = 0;
};

// Frozen eval-mode graph embeddings, one row per graph in dataset order.
Array embed_all(const std::vector<Graph>& graphs, const GinEncoder& encoder,
                std::size_t batch_size = 64);

// Minimizes mean cross-entropy + (l2/2)*||W||^2 by deterministic full-batch
// first-order descent from a seed-derived start, keeping the best iterate.
// Stops when the gradient inf-norm drops below tolerance or after
// max_iterations (logged).
LinearModel train_linear(const Array& features, const std::vector<int>& labels, double l2,
                         std::uint64_t seed, std::size_t max_iterations = 500,
                         double tolerance = 1e-6);

double predict_accuracy(const LinearModel& model, const Array& features,
                        const std::vector<int>& labels);
double linear_objective(const LinearModel& model, const Array& features,
                        const std::vector<int>& labels, double l2);

struct EvalResult {
  std::vector<std::vector<double>> fold_accuracies;  // [seed][fold]
  std::vector<std::vector<double>> chosen_l2;        // [seed][fold]
  std::vector<double> seed_means;
  double mean = 0.0;
  double stddev = 0.0;  // over the seed-level means
};

// Called with the exact index set fed to each train_linear invocation.
using TrainCallObserver = std::function<void(const std::vector<std::size_t>& train_indices,
                                             std::size_t seed_index, std::size_t fold_index,
                                             bool selection_phase)>;

// Frozen-encoder protocol: per probe seed, stratified folds; per fold, the
// l2 strength is chosen on an inner validation split of the training
// portion, the classifier is retrained on the full training portion, and
// accuracy is measured on the held-out fold.  Encoder parameters are never
// touched.
EvalResult evaluate(const std::vector<Graph>& graphs, const GinEncoder& encoder,
                    const ProbeConfig& cfg, std::uint64_t seed,
                    const TrainCallObserver& observer = {});

}  // namespace hagcl
