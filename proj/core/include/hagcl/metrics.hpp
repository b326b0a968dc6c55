#pragma once

#include <fstream>
#include <string>

#include "hagcl/trainer.hpp"

// fwd-declared in trainer.hpp consumers; defined here
#include <nlohmann/json_fwd.hpp>

namespace hagcl {

nlohmann::json to_json(const EpochMetrics& m);
EpochMetrics epoch_metrics_from_json(const nlohmann::json& j);

// Appends one structured record per epoch to a line-delimited file.
class MetricsWriter {
public:
  explicit MetricsWriter(const std::string& path);
  void append(const EpochMetrics& m);

private:
  std::ofstream out_;
};

}  // namespace hagcl
