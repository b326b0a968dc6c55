#include "hagcl/adam.hpp"

#include <cmath>

#include "hagcl/error.hpp"

namespace hagcl {

AdamOptimizer::AdamOptimizer(std::vector<Value> params, AdamConfig cfg) : cfg_(cfg) {
  if (cfg_.lr <= 0.0) throw ContractError("AdamOptimizer: learning rate must be positive");
  slots_.reserve(params.size());
  for (Value& p : params) {
    if (!p.defined() || !p.requires_grad())
      throw ContractError("AdamOptimizer: parameters must be trainable leaves");
    Slot slot{p, Array::zeros_like(p.data()), Array::zeros_like(p.data())};
    slots_.push_back(std::move(slot));
  }
}

void AdamOptimizer::step() {
  for (Slot& slot : slots_)
    if (!slot.param.node()->grad_allocated())
      throw ContractError("adam step: parameter is missing a populated gradient");

  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  for (Slot& slot : slots_) {
    Array& x = slot.param.mutable_data();
    Array& g = slot.param.mutable_grad();
    Array& m = slot.first_moment;
    Array& v = slot.second_moment;
    for (std::size_t i = 0; i < x.size(); ++i) {
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      x[i] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
    g.fill(0.0);
  }
}

}  // namespace hagcl
