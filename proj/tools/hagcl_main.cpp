// Command-line entry point: pretraining, linear-probe evaluation, ablation
// sweeps and dataset statistics.
//
// Exit codes: 0 success, 1 config/validation error, 2 data error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hagcl/checkpoint.hpp"
#include "hagcl/config.hpp"
#include "hagcl/error.hpp"
#include "hagcl/metrics.hpp"
#include "hagcl/probe.hpp"
#include "hagcl/trainer.hpp"
#include "hagcl/tu_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dataset;
  std::optional<std::string> mode;
  std::optional<std::string> out;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_file, "JSON config file");
  cmd->add_option("--seed", ov.seed, "override the run seed");
  cmd->add_option("--dataset", ov.dataset, "override the dataset directory");
  cmd->add_option("--mode", ov.mode, "override the augmentation mode (all|edge_only|feature_only)");
  cmd->add_option("--out", ov.out, "override the output directory");
}

hagcl::RunConfig resolve_config(const Overrides& ov) {
  hagcl::RunConfig cfg;
  if (!ov.config_file.empty()) cfg = hagcl::load_run_config(ov.config_file);
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.dataset) {
    cfg.dataset_path = *ov.dataset;
    if (cfg.dataset_name.empty())
      cfg.dataset_name = fs::path(*ov.dataset).filename().string();
  }
  if (ov.mode) cfg.mode = hagcl::augmentation_mode_from_string(*ov.mode);
  if (ov.out) cfg.output_dir = *ov.out;
  hagcl::validate(cfg);
  return cfg;
}

void write_snapshot(const hagcl::RunConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  hagcl::save_run_config(cfg, cfg.output_dir + "/resolved_config.json");
}

int cmd_pretrain(const hagcl::RunConfig& cfg) {
  const hagcl::TuDataset dataset = hagcl::parse_tu_dataset(cfg.dataset_path, cfg.dataset_name);
  write_snapshot(cfg);
  std::cout << "pretraining on " << cfg.dataset_name << " (" << dataset.stats.num_graphs
            << " graphs, mode " << hagcl::to_string(cfg.mode) << ", seed " << cfg.seed << ")\n";
  const hagcl::PretrainResult result = hagcl::pretrain(dataset.graphs, cfg.train_config());
  const hagcl::EpochMetrics& last = result.metrics.back();
  std::cout << "done: " << cfg.epochs << " epochs, final max-loss " << last.max_loss;
  if (last.edge_drop_ratio) std::cout << ", edge drop ratio " << *last.edge_drop_ratio;
  if (last.feature_mask_ratio) std::cout << ", feature mask ratio " << *last.feature_mask_ratio;
  std::cout << "\ncheckpoint: " << cfg.output_dir << "/checkpoint_final.bin\n";
  return 0;
}

int cmd_evaluate(const hagcl::RunConfig& cfg, const std::string& checkpoint) {
  const hagcl::TuDataset dataset = hagcl::parse_tu_dataset(cfg.dataset_path, cfg.dataset_name);
  write_snapshot(cfg);
  hagcl::Trainer model(dataset.graphs[0].feature_dim(), cfg.train_config());
  hagcl::load_checkpoint_into(checkpoint, model.params());
  const hagcl::EvalResult result =
      hagcl::evaluate(dataset.graphs, model.encoder(), cfg.probe, cfg.seed);
  std::printf("accuracy: %.4f +/- %.4f (%zu seeds x %zu folds)\n", result.mean, result.stddev,
              cfg.probe.num_seeds, cfg.probe.num_folds);
  std::ofstream out(cfg.output_dir + "/results.json");
  if (!out) throw hagcl::DataError("cannot write results file under " + cfg.output_dir);
  out << hagcl::to_json(result, cfg.dataset_name, hagcl::config_hash_hex(cfg)).dump(2) << "\n";
  return 0;
}

int cmd_ablation(const hagcl::RunConfig& base) {
  const hagcl::TuDataset dataset = hagcl::parse_tu_dataset(base.dataset_path, base.dataset_name);
  fs::create_directories(base.output_dir);
  std::ofstream curves(base.output_dir + "/ablation_curves.jsonl");
  if (!curves) throw hagcl::DataError("cannot write under " + base.output_dir);

  struct Row {
    std::string mode;
    double mean;
    double stddev;
  };
  std::vector<Row> rows;
  for (const auto mode : {hagcl::AugmentationMode::kEdgeOnly,
                          hagcl::AugmentationMode::kFeatureOnly, hagcl::AugmentationMode::kAll}) {
    hagcl::RunConfig cfg = base;
    cfg.mode = mode;
    cfg.output_dir = base.output_dir + "/" + hagcl::to_string(mode);
    write_snapshot(cfg);
    std::cout << "ablation mode " << hagcl::to_string(mode) << "...\n";
    const hagcl::PretrainResult trained = hagcl::pretrain(dataset.graphs, cfg.train_config());
    for (const hagcl::EpochMetrics& m : trained.metrics) {
      json record = hagcl::to_json(m);
      record["mode"] = hagcl::to_string(mode);
      curves << record.dump() << "\n";
    }
    const hagcl::EvalResult result =
        hagcl::evaluate(dataset.graphs, trained.trainer->encoder(), cfg.probe, cfg.seed);
    std::ofstream out(cfg.output_dir + "/results.json");
    out << hagcl::to_json(result, cfg.dataset_name, hagcl::config_hash_hex(cfg)).dump(2) << "\n";
    rows.push_back({hagcl::to_string(mode), result.mean, result.stddev});
  }

  std::ofstream summary(base.output_dir + "/ablation_summary.tsv");
  summary << "mode\taccuracy_mean\taccuracy_std\n";
  std::cout << "\nmode            accuracy\n";
  for (const Row& row : rows) {
    summary << row.mode << "\t" << row.mean << "\t" << row.stddev << "\n";
    std::printf("%-15s %.4f +/- %.4f\n", row.mode.c_str(), row.mean, row.stddev);
  }
  return 0;
}

int cmd_stats(const std::string& path, const std::string& name) {
  const hagcl::TuDataset dataset = hagcl::parse_tu_dataset(path, name);
  const hagcl::DatasetStats& s = dataset.stats;
  std::printf("%-16s %8s %10s %10s %8s %9s\n", "dataset", "graphs", "avg_nodes", "avg_edges",
              "classes", "features");
  std::printf("%-16s %8zu %10.2f %10.2f %8zu %9s\n", name.c_str(), s.num_graphs, s.avg_nodes,
              s.avg_edges, s.num_classes,
              s.num_node_features ? std::to_string(*s.num_node_features).c_str() : "none");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learnable-view graph contrastive learning"};
  app.require_subcommand(1);

  Overrides pretrain_ov, evaluate_ov, ablation_ov;
  std::string checkpoint_path, stats_path, stats_name;

  CLI::App* pretrain = app.add_subcommand("pretrain", "train encoder and view generators");
  add_common_flags(pretrain, pretrain_ov);

  CLI::App* evaluate = app.add_subcommand("evaluate", "linear-probe a trained checkpoint");
  add_common_flags(evaluate, evaluate_ov);
  evaluate->add_option("--checkpoint", checkpoint_path, "parameter checkpoint")->required();

  CLI::App* ablation =
      app.add_subcommand("ablation", "run edge_only / feature_only / all under one seed");
  add_common_flags(ablation, ablation_ov);

  CLI::App* stats = app.add_subcommand("stats", "print dataset statistics");
  stats->add_option("path", stats_path, "dataset directory")->required();
  stats->add_option("name", stats_name, "dataset name (file prefix)")->required();

  try {
    app.parse(argc, argv);
    if (pretrain->parsed()) return cmd_pretrain(resolve_config(pretrain_ov));
    if (evaluate->parsed()) return cmd_evaluate(resolve_config(evaluate_ov), checkpoint_path);
    if (ablation->parsed()) return cmd_ablation(resolve_config(ablation_ov));
    if (stats->parsed()) return cmd_stats(stats_path, stats_name);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const hagcl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const hagcl::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hagcl::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hagcl::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const hagcl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
