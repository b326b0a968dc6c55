#include "hagcl/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "hagcl/error.hpp"

namespace hagcl {

namespace {

using nlohmann::json;

// Rejects unknown keys so typos surface as field-level errors.
class Section {
public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + path_ + "' must be an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    known_.push_back(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: field '" + path_ + key + "' has the wrong type");
    }
  }

  bool has(const char* key) {
    known_.push_back(key);
    return j_.contains(key);
  }

  const json& at(const char* key) const { return j_.at(key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(known_.begin(), known_.end(), key) == known_.end())
        throw ConfigError("config: unknown field '" + path_ + key + "'");
    }
  }

private:
  const json& j_;
  std::string path_;
  std::vector<std::string> known_;
};

}  // namespace

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.batch_size = batch_size;
  t.seed = seed;
  t.mode = mode;
  t.lr = lr;
  t.encoder = encoder;
  t.gumbel = gumbel;
  t.loss = loss;
  t.checkpoint_every = checkpoint_every;
  t.out_dir = output_dir;
  return t;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig cfg;
  Section root(j, "");
  if (root.has("dataset")) {
    Section dataset(root.at("dataset"), "dataset.");
    dataset.read("path", cfg.dataset_path);
    dataset.read("name", cfg.dataset_name);
    dataset.finish();
  }
  root.read("output_dir", cfg.output_dir);
  root.read("seed", cfg.seed);
  if (root.has("encoder")) {
    Section enc(root.at("encoder"), "encoder.");
    enc.read("num_layers", cfg.encoder.num_layers);
    enc.read("hidden_dim", cfg.encoder.hidden_dim);
    enc.read("embedding_dim", cfg.encoder.embedding_dim);
    enc.read("use_batch_norm", cfg.encoder.use_batch_norm);
    enc.finish();
  }
  if (root.has("gumbel")) {
    Section gum(root.at("gumbel"), "gumbel.");
    gum.read("temperature", cfg.gumbel.temperature);
    gum.read("hard", cfg.gumbel.hard);
    gum.finish();
  }
  if (root.has("loss")) {
    Section loss(root.at("loss"), "loss.");
    loss.read("temperature", cfg.loss.temperature);
    loss.read("pooled_min_negatives", cfg.loss.pooled_min_negatives);
    loss.finish();
  }
  if (root.has("train")) {
    Section train(root.at("train"), "train.");
    train.read("epochs", cfg.epochs);
    train.read("batch_size", cfg.batch_size);
    train.read("lr", cfg.lr);
    std::string mode = to_string(cfg.mode);
    train.read("mode", mode);
    cfg.mode = augmentation_mode_from_string(mode);
    train.read("checkpoint_every", cfg.checkpoint_every);
    train.finish();
  }
  if (root.has("probe")) {
    Section probe(root.at("probe"), "probe.");
    probe.read("num_folds", cfg.probe.num_folds);
    probe.read("num_seeds", cfg.probe.num_seeds);
    probe.read("l2_grid", cfg.probe.l2_grid);
    probe.read("inner_val_fraction", cfg.probe.inner_val_fraction);
    probe.read("max_iterations", cfg.probe.max_iterations);
    probe.read("tolerance", cfg.probe.tolerance);
    probe.read("embed_batch_size", cfg.probe.embed_batch_size);
    probe.finish();
  }
  root.finish();
  return cfg;
}

json to_json(const RunConfig& cfg) {
  return json{
      {"dataset", {{"path", cfg.dataset_path}, {"name", cfg.dataset_name}}},
      {"output_dir", cfg.output_dir},
      {"seed", cfg.seed},
      {"encoder",
       {{"num_layers", cfg.encoder.num_layers},
        {"hidden_dim", cfg.encoder.hidden_dim},
        {"embedding_dim", cfg.encoder.embedding_dim},
        {"use_batch_norm", cfg.encoder.use_batch_norm}}},
      {"gumbel", {{"temperature", cfg.gumbel.temperature}, {"hard", cfg.gumbel.hard}}},
      {"loss",
       {{"temperature", cfg.loss.temperature},
        {"pooled_min_negatives", cfg.loss.pooled_min_negatives}}},
      {"train",
       {{"epochs", cfg.epochs},
        {"batch_size", cfg.batch_size},
        {"lr", cfg.lr},
        {"mode", to_string(cfg.mode)},
        {"checkpoint_every", cfg.checkpoint_every}}},
      {"probe",
       {{"num_folds", cfg.probe.num_folds},
        {"num_seeds", cfg.probe.num_seeds},
        {"l2_grid", cfg.probe.l2_grid},
        {"inner_val_fraction", cfg.probe.inner_val_fraction},
        {"max_iterations", cfg.probe.max_iterations},
        {"tolerance", cfg.probe.tolerance},
        {"embed_batch_size", cfg.probe.embed_batch_size}}}};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return run_config_from_json(j);
}

void save_run_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write config snapshot: " + path);
  out << to_json(cfg).dump(2) << "\n";
}

void validate(const RunConfig& cfg) {
  if (cfg.dataset_path.empty()) throw ConfigError("config: dataset.path is required");
  if (!std::filesystem::is_directory(cfg.dataset_path))
    throw ConfigError("config: dataset.path '" + cfg.dataset_path + "' is not a directory");
  if (cfg.dataset_name.empty()) throw ConfigError("config: dataset.name is required");
  if (cfg.epochs < 1) throw ConfigError("config: train.epochs must be >= 1");
  if (cfg.batch_size < 1) throw ConfigError("config: train.batch_size must be >= 1");
  if (cfg.lr <= 0.0) throw ConfigError("config: train.lr must be positive");
  if (cfg.gumbel.temperature <= 0.0)
    throw ConfigError("config: gumbel.temperature must be positive");
  if (cfg.loss.temperature <= 0.0) throw ConfigError("config: loss.temperature must be positive");
  if (cfg.probe.num_folds < 2) throw ConfigError("config: probe.num_folds must be >= 2");
  if (cfg.probe.num_seeds < 1) throw ConfigError("config: probe.num_seeds must be >= 1");
  if (cfg.probe.l2_grid.empty()) throw ConfigError("config: probe.l2_grid must be non-empty");
  if (cfg.probe.inner_val_fraction < 0.0 || cfg.probe.inner_val_fraction >= 1.0)
    throw ConfigError("config: probe.inner_val_fraction must be in [0, 1)");
}

std::string config_hash_hex(const RunConfig& cfg) {
  const std::string dump = to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

json to_json(const EvalResult& result, const std::string& dataset_name,
             const std::string& config_hash) {
  return json{{"dataset", dataset_name},
              {"config_hash", config_hash},
              {"fold_accuracies", result.fold_accuracies},
              {"chosen_l2", result.chosen_l2},
              {"seed_means", result.seed_means},
              {"mean", result.mean},
              {"std", result.stddev}};
}

EvalResult eval_result_from_json(const json& j) {
  EvalResult r;
  r.fold_accuracies = j.at("fold_accuracies").get<std::vector<std::vector<double>>>();
  r.chosen_l2 = j.at("chosen_l2").get<std::vector<std::vector<double>>>();
  r.seed_means = j.at("seed_means").get<std::vector<double>>();
  r.mean = j.at("mean").get<double>();
  r.stddev = j.at("std").get<double>();
  return r;
}

}  // namespace hagcl
