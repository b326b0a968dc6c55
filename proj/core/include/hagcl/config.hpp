#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "hagcl/probe.hpp"
#include "hagcl/trainer.hpp"

namespace hagcl {

// Resolved run configuration.  Every field has a default; a config file may
// set any subset and command-line flags override file values.  A resolved
// snapshot (all defaults materialized) is written next to every run's
// outputs so the run can be reproduced bit-exactly.
struct RunConfig {
  std::string dataset_path;
  std::string dataset_name;
  std::string output_dir = "runs/default";
  std::uint64_t seed = 1;
  int epochs = 20;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  AugmentationMode mode = AugmentationMode::kAll;
  int checkpoint_every = 0;
  EncoderConfig encoder;
  GumbelConfig gumbel;
  LossConfig loss;
  ProbeConfig probe;

  TrainConfig train_config() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

// Parse errors and unknown fields raise ConfigError with the field path.
RunConfig load_run_config(const std::string& path);
void save_run_config(const RunConfig& cfg, const std::string& path);

// Range checks plus existence of the dataset directory.
void validate(const RunConfig& cfg);

// FNV-1a of the canonical JSON dump, as hex.
std::string config_hash_hex(const RunConfig& cfg);

nlohmann::json to_json(const EvalResult& result, const std::string& dataset_name,
                       const std::string& config_hash);
EvalResult eval_result_from_json(const nlohmann::json& j);

}  // namespace hagcl
