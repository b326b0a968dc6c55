#pragma once

#include <optional>

#include "hagcl/ops.hpp"

namespace hagcl {

struct LossConfig {
  double temperature = 0.2;
  // When set, the anchored loss for each generator also uses the other
  // generator's views as negatives (one pooled negative set).
  bool pooled_min_negatives = false;
};

// Similarity is cosine throughout, with a 1e-12 norm floor so fully masked
// (all-zero) embedding rows stay finite.

// Pairwise view loss over the interleaved 2N arrangement: views (2k-1, 2k)
// are the positive pair for graph k; each anchor's denominator runs over
// all other views (positive included).  Non-negative by construction.
Value info_nce_pair(const Value& z_a, const Value& z_b, const LossConfig& cfg);

// Anchored loss with the original graph's embedding as row-wise anchor and
// the other graphs' views of the same generator as negatives.  Positive
// sign: minimizing this value minimizes the mutual-information estimate.
// N=1 is degenerate and returns 0 with a logged warning.  Rows of
// `extra_negatives`, when given, enter every anchor's denominator.
Value info_nce_anchor(const Value& z_orig, const Value& z_view, const LossConfig& cfg,
                      const std::optional<Value>& extra_negatives = std::nullopt);

}  // namespace hagcl
