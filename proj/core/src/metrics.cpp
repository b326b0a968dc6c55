#include "hagcl/metrics.hpp"

#include <nlohmann/json.hpp>

#include "hagcl/error.hpp"

namespace hagcl {

namespace {

nlohmann::json opt_to_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

std::optional<double> opt_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const EpochMetrics& m) {
  return nlohmann::json{{"epoch", m.epoch},
                        {"min_loss_edge", opt_to_json(m.min_loss_edge)},
                        {"min_loss_feature", opt_to_json(m.min_loss_feature)},
                        {"max_loss", m.max_loss},
                        {"edge_drop_ratio", opt_to_json(m.edge_drop_ratio)},
                        {"feature_mask_ratio", opt_to_json(m.feature_mask_ratio)},
                        {"wall_seconds", m.wall_seconds}};
}

EpochMetrics epoch_metrics_from_json(const nlohmann::json& j) {
  EpochMetrics m;
  m.epoch = j.at("epoch").get<int>();
  m.min_loss_edge = opt_from_json(j, "min_loss_edge");
  m.min_loss_feature = opt_from_json(j, "min_loss_feature");
  m.max_loss = j.at("max_loss").get<double>();
  m.edge_drop_ratio = opt_from_json(j, "edge_drop_ratio");
  m.feature_mask_ratio = opt_from_json(j, "feature_mask_ratio");
  m.wall_seconds = j.at("wall_seconds").get<double>();
  return m;
}

MetricsWriter::MetricsWriter(const std::string& path) : out_(path, std::ios::app) {
  if (!out_) throw DataError("cannot open metrics file: " + path);
}

void MetricsWriter::append(const EpochMetrics& m) {
  out_ << to_json(m).dump() << "\n";
  out_.flush();
}

}  // namespace hagcl
