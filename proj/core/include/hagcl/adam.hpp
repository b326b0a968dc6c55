#pragma once

#include <cstdint>
#include <vector>

#include "hagcl/value.hpp"

namespace hagcl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam over a fixed set of parameters.
//
// step() consumes the gradients populated by backward() and zeroes them
// afterwards, so stale gradients never leak into the next update.
class AdamOptimizer {
public:
  explicit AdamOptimizer(std::vector<Value> params, AdamConfig cfg = {});

  void step();
  std::int64_t step_count() const { return step_count_; }
  const AdamConfig& config() const { return cfg_; }

private:
  struct Slot {
    Value param;
    Array first_moment;
    Array second_moment;
  };
  std::vector<Slot> slots_;
  AdamConfig cfg_;
  std::int64_t step_count_ = 0;
};

}  // namespace hagcl
