#include "hagcl/objectives.hpp"

#include <iostream>

#include "hagcl/error.hpp"

namespace hagcl {

namespace {

void check_views(const Value& a, const Value& b, const char* what) {
  if (a.data().rank() != 2 || b.data().rank() != 2 || !a.data().same_shape(b.data()))
    throw ShapeError(std::string(what) + ": views must share one [N x d] shape, got " +
                     a.data().shape_str() + " and " + b.data().shape_str());
  if (a.data().rows() == 0) throw ContractError(std::string(what) + ": empty batch");
}

Value cosine_normalize_rows(const Value& z) {
  const std::size_t d = z.data().row_size();
  const Value ones = Value::constant(Array({d, 1}, 1.0));
  const Value sq_norm = matmul(mul(z, z), ones);            // [N x 1]
  const Value norm = sqrt(clamp_min(sq_norm, 1e-24));        // floor at 1e-12
  return scale_rows(z, div(Value::scalar(1.0), norm));
}

Value row_sums(const Value& m) {
  const Value ones = Value::constant(Array({m.data().row_size(), 1}, 1.0));
  return matmul(m, ones);
}

}  // namespace

Value info_nce_pair(const Value& z_a, const Value& z_b, const LossConfig& cfg) {
  check_views(z_a, z_b, "info_nce_pair");
  if (cfg.temperature <= 0.0) throw ContractError("info_nce_pair: temperature must be positive");
  const std::size_t n = z_a.data().rows();
  const std::size_t two_n = 2 * n;

  // Interleave so views (2k, 2k+1) of graph k sit side by side.
  std::vector<std::size_t> order(two_n);
  for (std::size_t k = 0; k < n; ++k) {
    order[2 * k] = k;
    order[2 * k + 1] = n + k;
  }
  const Value views = cosine_normalize_rows(gather_rows(concat_rows(z_a, z_b), order));
  const Value sim = mul(matmul(views, transpose(views)), Value::scalar(1.0 / cfg.temperature));

  Array off_diag({two_n, two_n}, 1.0);
  for (std::size_t i = 0; i < two_n; ++i) off_diag.at(i, i) = 0.0;
  Array positives({two_n, two_n}, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    positives.at(2 * k, 2 * k + 1) = 1.0;
    positives.at(2 * k + 1, 2 * k) = 1.0;
  }

  const Value log_den = log(row_sums(mul(exp(sim), Value::constant(std::move(off_diag)))));
  const Value pos_sum = sum_all(mul(sim, Value::constant(std::move(positives))));
  return mul(sub(sum_all(log_den), pos_sum), Value::scalar(1.0 / static_cast<double>(two_n)));
}

Value info_nce_anchor(const Value& z_orig, const Value& z_view, const LossConfig& cfg,
                      const std::optional<Value>& extra_negatives) {
  check_views(z_orig, z_view, "info_nce_anchor");
  if (cfg.temperature <= 0.0) throw ContractError("info_nce_anchor: temperature must be positive");
  const std::size_t n = z_orig.data().rows();
  if (n < 2) {
    std::clog << "[hagcl] info_nce_anchor: batch of 1 has no negatives; loss is 0\n";
    return Value::scalar(0.0);
  }
  if (extra_negatives && !extra_negatives->data().same_shape(z_orig.data()))
    throw ShapeError("info_nce_anchor: extra negatives must match the view shape");

  const Value anchors = cosine_normalize_rows(z_orig);
  const Value views = cosine_normalize_rows(z_view);
  const Value sim = mul(matmul(anchors, transpose(views)), Value::scalar(1.0 / cfg.temperature));

  Array off_diag({n, n}, 1.0);
  Array diagonal({n, n}, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    off_diag.at(i, i) = 0.0;
    diagonal.at(i, i) = 1.0;
  }

  Value den = row_sums(mul(exp(sim), Value::constant(std::move(off_diag))));
  if (extra_negatives) {
    const Value sim_extra = mul(matmul(anchors, transpose(cosine_normalize_rows(*extra_negatives))),
                                Value::scalar(1.0 / cfg.temperature));
    den = add(den, row_sums(exp(sim_extra)));
  }
  const Value pos_sum = sum_all(mul(sim, Value::constant(std::move(diagonal))));
  return mul(sub(pos_sum, sum_all(log(den))), Value::scalar(1.0 / static_cast<double>(n)));
}

}  // namespace hagcl
