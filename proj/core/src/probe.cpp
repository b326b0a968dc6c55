#include "hagcl/probe.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <set>

#include "hagcl/error.hpp"
#include "hagcl/rng.hpp"

namespace hagcl {

namespace {

Array subset_rows(const Array& m, const std::vector<std::size_t>& idx) {
  const std::size_t d = m.row_size();
  Array out({idx.size(), d});
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < d; ++c) out.at(r, c) = m.at(idx[r], c);
  return out;
}

std::vector<int> subset(const std::vector<int>& v, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

// Row-stable softmax probabilities of standardized features under the model.
Array class_probabilities(const LinearModel& model, const Array& features) {
  const std::size_t n = features.rows(), d = features.row_size(), c = model.num_classes;
  Array probs({n, c});
  for (std::size_t r = 0; r < n; ++r) {
    double max_logit = -1e300;
    for (std::size_t k = 0; k < c; ++k) {
      double logit = model.bias[k];
      for (std::size_t j = 0; j < d; ++j) {
        const double x = (features.at(r, j) - model.feature_mean[j]) / model.feature_std[j];
        logit += x * model.weights.at(j, k);
      }
      probs.at(r, k) = logit;
      max_logit = std::max(max_logit, logit);
    }
    double den = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      probs.at(r, k) = std::exp(probs.at(r, k) - max_logit);
      den += probs.at(r, k);
    }
    for (std::size_t k = 0; k < c; ++k) probs.at(r, k) /= den;
  }
  return probs;
}

}  // namespace

Array embed_all(const std::vector<Graph>& graphs, const GinEncoder& encoder,
                std::size_t batch_size) {
  if (graphs.empty()) throw ContractError("embed_all: no graphs");
  if (batch_size == 0) throw ContractError("embed_all: batch_size must be >= 1");
  const std::size_t dim = encoder.stack().config().embedding_dim;
  Array out({graphs.size(), dim});
  for (std::size_t start = 0; start < graphs.size(); start += batch_size) {
    const std::size_t end = std::min(graphs.size(), start + batch_size);
    std::vector<std::size_t> idx(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const GraphBatch batch = make_batch(graphs, idx);
    const Value z = encoder.encode_graphs(batch, std::nullopt, std::nullopt, Mode::kEval);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < dim; ++c) out.at(idx[r], c) = z.data().at(r, c);
  }
  return out;
}

LinearModel train_linear(const Array& features, const std::vector<int>& labels, double l2,
                         std::uint64_t seed, std::size_t max_iterations, double tolerance) {
  const std::size_t n = features.rows(), d = features.row_size();
  if (labels.size() != n) throw ContractError("train_linear: label count mismatch");
  if (n == 0) throw ContractError("train_linear: empty training set");
  std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2) throw ContractError("train_linear: needs at least 2 classes");
  const std::size_t c = static_cast<std::size_t>(*present.rbegin()) + 1;

  LinearModel model;
  model.num_classes = c;
  model.feature_mean = Array({d});
  model.feature_std = Array({d}, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += features.at(r, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double diff = features.at(r, j) - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(n);
    model.feature_mean[j] = mean;
    model.feature_std[j] = std::max(std::sqrt(var), 1e-8);
  }

  Array x({n, d});
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j)
      x.at(r, j) = (features.at(r, j) - model.feature_mean[j]) / model.feature_std[j];

  Array w({d, c});
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng::uniform_in(seed, i, -1e-3, 1e-3);
  Array bias({c});

  const double adam_lr = 0.1, beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  Array mw({d, c}), vw({d, c}), mb({c}), vb({c});

  const auto objective_of = [&](const Array& wt, const Array& bt) {
    double ce = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double max_logit = -1e300;
      std::vector<double> logits(c);
      for (std::size_t k = 0; k < c; ++k) {
        double logit = bt[k];
        for (std::size_t j = 0; j < d; ++j) logit += x.at(r, j) * wt.at(j, k);
        logits[k] = logit;
        max_logit = std::max(max_logit, logit);
      }
      double den = 0.0;
      for (std::size_t k = 0; k < c; ++k) den += std::exp(logits[k] - max_logit);
      ce -= logits[static_cast<std::size_t>(labels[r])] - max_logit - std::log(den);
    }
    ce /= static_cast<double>(n);
    double reg = 0.0;
    for (std::size_t i = 0; i < wt.size(); ++i) reg += wt[i] * wt[i];
    return ce + 0.5 * l2 * reg;
  };

  Array best_w = w, best_b = bias;
  double best_obj = objective_of(w, bias);
  bool converged = false;

  for (std::size_t it = 1; it <= max_iterations; ++it) {
    // Softmax residuals, then full-batch gradients.
    Array gw({d, c}), gb({c});
    for (std::size_t r = 0; r < n; ++r) {
      double max_logit = -1e300;
      std::vector<double> p(c);
      for (std::size_t k = 0; k < c; ++k) {
        double logit = bias[k];
        for (std::size_t j = 0; j < d; ++j) logit += x.at(r, j) * w.at(j, k);
        p[k] = logit;
        max_logit = std::max(max_logit, logit);
      }
      double den = 0.0;
      for (std::size_t k = 0; k < c; ++k) {
        p[k] = std::exp(p[k] - max_logit);
        den += p[k];
      }
      for (std::size_t k = 0; k < c; ++k) {
        const double residual =
            (p[k] / den - (static_cast<std::size_t>(labels[r]) == k ? 1.0 : 0.0)) /
            static_cast<double>(n);
        gb[k] += residual;
        for (std::size_t j = 0; j < d; ++j) gw.at(j, k) += residual * x.at(r, j);
      }
    }
    for (std::size_t i = 0; i < gw.size(); ++i) gw[i] += l2 * w[i];

    double grad_inf = 0.0;
    for (std::size_t i = 0; i < gw.size(); ++i) grad_inf = std::max(grad_inf, std::abs(gw[i]));
    for (std::size_t i = 0; i < gb.size(); ++i) grad_inf = std::max(grad_inf, std::abs(gb[i]));
    if (grad_inf < tolerance) {
      converged = true;
      break;
    }

    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(it));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(it));
    for (std::size_t i = 0; i < w.size(); ++i) {
      mw[i] = beta1 * mw[i] + (1.0 - beta1) * gw[i];
      vw[i] = beta2 * vw[i] + (1.0 - beta2) * gw[i] * gw[i];
      w[i] -= adam_lr * (mw[i] / bc1) / (std::sqrt(vw[i] / bc2) + adam_eps);
    }
    for (std::size_t i = 0; i < bias.size(); ++i) {
      mb[i] = beta1 * mb[i] + (1.0 - beta1) * gb[i];
      vb[i] = beta2 * vb[i] + (1.0 - beta2) * gb[i] * gb[i];
      bias[i] -= adam_lr * (mb[i] / bc1) / (std::sqrt(vb[i] / bc2) + adam_eps);
    }

    const double obj = objective_of(w, bias);
    if (obj < best_obj) {
      best_obj = obj;
      best_w = w;
      best_b = bias;
    }
  }
  if (!converged)
    std::clog << "[hagcl] train_linear: stopped at max_iterations=" << max_iterations
              << " (l2=" << l2 << ")\n";

  model.weights = std::move(best_w);
  model.bias = std::move(best_b);
  return model;
}

double predict_accuracy(const LinearModel& model, const Array& features,
                        const std::vector<int>& labels) {
  if (labels.empty()) throw ContractError("predict_accuracy: empty evaluation set");
  const Array probs = class_probabilities(model, features);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < features.rows(); ++r) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < model.num_classes; ++k)
      if (probs.at(r, k) > probs.at(r, arg)) arg = k;
    if (arg == static_cast<std::size_t>(labels[r])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(features.rows());
}

double linear_objective(const LinearModel& model, const Array& features,
                        const std::vector<int>& labels, double l2) {
  const Array probs = class_probabilities(model, features);
  double ce = 0.0;
  for (std::size_t r = 0; r < features.rows(); ++r)
    ce -= std::log(std::max(probs.at(r, static_cast<std::size_t>(labels[r])), 1e-300));
  ce /= static_cast<double>(features.rows());
  double reg = 0.0;
  for (std::size_t i = 0; i < model.weights.size(); ++i)
    reg += model.weights[i] * model.weights[i];
  return ce + 0.5 * l2 * reg;
}

EvalResult evaluate(const std::vector<Graph>& graphs, const GinEncoder& encoder,
                    const ProbeConfig& cfg, std::uint64_t seed,
                    const TrainCallObserver& observer) {
  if (cfg.num_folds < 2) throw ContractError("evaluate: num_folds must be >= 2");
  if (cfg.num_seeds < 1) throw ContractError("evaluate: num_seeds must be >= 1");
  if (cfg.l2_grid.empty()) throw ContractError("evaluate: empty l2 grid");

  const Array embeddings = embed_all(graphs, encoder, cfg.embed_batch_size);
  std::vector<int> labels;
  labels.reserve(graphs.size());
  for (const Graph& g : graphs) labels.push_back(g.label);

  EvalResult result;
  for (std::size_t s = 0; s < cfg.num_seeds; ++s) {
    const std::uint64_t probe_seed = rng::derive(seed, rng::stream::kProbeSeed, s);
    const auto folds = stratified_kfold(labels, cfg.num_folds, probe_seed);

    std::vector<double> accs, l2s;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::vector<char> in_test(graphs.size(), 0);
      for (std::size_t i : folds[f]) in_test[i] = 1;
      std::vector<std::size_t> train_idx;
      for (std::size_t i = 0; i < graphs.size(); ++i)
        if (!in_test[i]) train_idx.push_back(i);

      // Inner validation split of the training portion, per class so every
      // class keeps at least one training member.
      std::map<int, std::vector<std::size_t>> by_class;
      for (std::size_t i : train_idx) by_class[labels[i]].push_back(i);
      std::vector<std::size_t> inner_train, inner_val;
      std::size_t class_counter = 0;
      for (auto& [cls, members] : by_class) {
        const auto perm = rng::shuffled_indices(
            members.size(), rng::derive(probe_seed, rng::stream::kInnerSplit, f, class_counter++));
        std::size_t val_count = static_cast<std::size_t>(
            cfg.inner_val_fraction * static_cast<double>(members.size()));
        val_count = std::min(val_count, members.size() - 1);
        for (std::size_t i = 0; i < members.size(); ++i)
          (i < val_count ? inner_val : inner_train).push_back(members[perm[i]]);
      }
      std::sort(inner_train.begin(), inner_train.end());
      std::sort(inner_val.begin(), inner_val.end());

      double chosen_l2 = cfg.l2_grid[cfg.l2_grid.size() / 2];
      const std::set<int> inner_classes = [&] {
        std::set<int> cs;
        for (std::size_t i : inner_train) cs.insert(labels[i]);
        return cs;
      }();
      if (!inner_val.empty() && inner_classes.size() >= 2) {
        double best_acc = -1.0;
        const Array x_sel = subset_rows(embeddings, inner_train);
        const auto y_sel = subset(labels, inner_train);
        const Array x_val = subset_rows(embeddings, inner_val);
        const auto y_val = subset(labels, inner_val);
        for (double l2 : cfg.l2_grid) {
          if (observer) observer(inner_train, s, f, /*selection_phase=*/true);
          const LinearModel candidate = train_linear(x_sel, y_sel, l2, rng::derive(probe_seed, f),
                                                     cfg.max_iterations, cfg.tolerance);
          const double acc = predict_accuracy(candidate, x_val, y_val);
          if (acc > best_acc) {
            best_acc = acc;
            chosen_l2 = l2;
          }
        }
      } else {
        std::clog << "[hagcl] evaluate: inner split unusable for fold " << f
                  << "; defaulting to l2=" << chosen_l2 << "\n";
      }

      if (observer) observer(train_idx, s, f, /*selection_phase=*/false);
      const LinearModel model =
          train_linear(subset_rows(embeddings, train_idx), subset(labels, train_idx), chosen_l2,
                       rng::derive(probe_seed, f), cfg.max_iterations, cfg.tolerance);
      accs.push_back(
          predict_accuracy(model, subset_rows(embeddings, folds[f]), subset(labels, folds[f])));
      l2s.push_back(chosen_l2);
    }
    result.fold_accuracies.push_back(accs);
    result.chosen_l2.push_back(l2s);
    result.seed_means.push_back(std::accumulate(accs.begin(), accs.end(), 0.0) /
                                static_cast<double>(accs.size()));
  }

  const double mean = std::accumulate(result.seed_means.begin(), result.seed_means.end(), 0.0) /
                      static_cast<double>(result.seed_means.size());
  double var = 0.0;
  for (double m : result.seed_means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(result.seed_means.size());
  result.mean = mean;
  result.stddev = std::sqrt(var);
  return result;
}

}  // namespace hagcl
