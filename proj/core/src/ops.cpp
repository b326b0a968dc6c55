#include "hagcl/ops.hpp"

#include <cmath>
#include <utility>

#include "hagcl/error.hpp"

namespace hagcl {

namespace {

using detail::ValueNode;

Value make_node(Array data, std::vector<Value> parents, std::function<void(ValueNode&)> rule) {
  auto node = std::make_shared<ValueNode>();
  node->data = std::move(data);
  bool requires_grad = false;
  node->parents.reserve(parents.size());
  for (const Value& p : parents) {
    requires_grad = requires_grad || p.requires_grad();
    node->parents.push_back(p.node());
  }
  node->requires_grad = requires_grad;
  if (requires_grad) node->backward_rule = std::move(rule);
  return Value(std::move(node));
}

double unary_forward(EwKind kind, double x) {
  switch (kind) {
    case EwKind::Neg:
      return -x;
    case EwKind::Relu:
      return x > 0.0 ? x : 0.0;
    case EwKind::Exp:
      return std::exp(x);
    case EwKind::Log:
      return std::log(x);
    case EwKind::Sqrt:
      return std::sqrt(x);
    case EwKind::Sigmoid:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    default:
      throw ContractError("elementwise: kind is not unary");
  }
}

// d out / d x, given input x and forward output y.
double unary_derivative(EwKind kind, double x, double y) {
  switch (kind) {
    case EwKind::Neg:
      return -1.0;
    case EwKind::Relu:
      return x > 0.0 ? 1.0 : 0.0;
    case EwKind::Exp:
      return y;
    case EwKind::Log:
      return 1.0 / x;
    case EwKind::Sqrt:
      return 0.5 / y;
    case EwKind::Sigmoid:
      return y * (1.0 - y);
    default:
      return 0.0;
  }
}

double binary_forward(EwKind kind, double x, double y) {
  switch (kind) {
    case EwKind::Add:
      return x + y;
    case EwKind::Sub:
      return x - y;
    case EwKind::Mul:
      return x * y;
    case EwKind::Div:
      return x / y;
    default:
      throw ContractError("elementwise: kind is not binary");
  }
}

void binary_derivatives(EwKind kind, double x, double y, double& dx, double& dy) {
  switch (kind) {
    case EwKind::Add:
      dx = 1.0;
      dy = 1.0;
      return;
    case EwKind::Sub:
      dx = 1.0;
      dy = -1.0;
      return;
    case EwKind::Mul:
      dx = y;
      dy = x;
      return;
    case EwKind::Div:
      dx = 1.0 / y;
      dy = -x / (y * y);
      return;
    default:
      dx = dy = 0.0;
  }
}

void check_unary_domain(EwKind kind, const Array& a) {
  if (kind == EwKind::Log) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] <= 0.0) throw DomainError("log: non-positive input");
  } else if (kind == EwKind::Sqrt) {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] < 0.0) throw DomainError("sqrt: negative input");
  }
}

}  // namespace

Value elementwise(EwKind kind, const Value& a) {
  check_unary_domain(kind, a.data());
  Array out = Array::zeros_like(a.data());
  const Array& in = a.data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = unary_forward(kind, in[i]);
  ValueNode* pa = a.node().get();
  return make_node(std::move(out), {a}, [kind, pa](ValueNode& self) {
    if (!pa->requires_grad) return;
    for (std::size_t i = 0; i < self.data.size(); ++i)
      pa->grad[i] += self.grad[i] * unary_derivative(kind, pa->data[i], self.data[i]);
  });
}

Value elementwise(EwKind kind, const Value& a, const Value& b) {
  const Array& da = a.data();
  const Array& db = b.data();
  const bool a_scalar = da.is_scalar();
  const bool b_scalar = db.is_scalar();
  if (!a_scalar && !b_scalar && !da.same_shape(db))
    throw ShapeError("elementwise: incompatible shapes " + da.shape_str() + " and " +
                     db.shape_str() + " (same-shape or scalar broadcasting only)");
  if (kind == EwKind::Div) {
    for (std::size_t i = 0; i < db.size(); ++i)
      if (db[i] == 0.0) throw DomainError("div: division by zero");
  }
  const Array& shape_src = a_scalar ? db : da;
  Array out = Array::zeros_like(shape_src);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = binary_forward(kind, da[a_scalar ? 0 : i], db[b_scalar ? 0 : i]);
  ValueNode* pa = a.node().get();
  ValueNode* pb = b.node().get();
  return make_node(std::move(out), {a, b}, [kind, pa, pb, a_scalar, b_scalar](ValueNode& self) {
    for (std::size_t i = 0; i < self.data.size(); ++i) {
      const double x = pa->data[a_scalar ? 0 : i];
      const double y = pb->data[b_scalar ? 0 : i];
      double dx, dy;
      binary_derivatives(kind, x, y, dx, dy);
      const double g = self.grad[i];
      if (pa->requires_grad) pa->grad[a_scalar ? 0 : i] += g * dx;
      if (pb->requires_grad) pb->grad[b_scalar ? 0 : i] += g * dy;
    }
  });
}

Value add(const Value& a, const Value& b) { return elementwise(EwKind::Add, a, b); }
Value sub(const Value& a, const Value& b) { return elementwise(EwKind::Sub, a, b); }
Value mul(const Value& a, const Value& b) { return elementwise(EwKind::Mul, a, b); }
Value div(const Value& a, const Value& b) { return elementwise(EwKind::Div, a, b); }
Value neg(const Value& a) { return elementwise(EwKind::Neg, a); }
Value relu(const Value& a) { return elementwise(EwKind::Relu, a); }
Value exp(const Value& a) { return elementwise(EwKind::Exp, a); }
Value log(const Value& a) { return elementwise(EwKind::Log, a); }
Value sqrt(const Value& a) { return elementwise(EwKind::Sqrt, a); }
Value sigmoid(const Value& a) { return elementwise(EwKind::Sigmoid, a); }

Value clamp_min(const Value& a, double floor) {
  const Array& in = a.data();
  Array out = Array::zeros_like(in);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] >= floor ? in[i] : floor;
  ValueNode* pa = a.node().get();
  return make_node(std::move(out), {a}, [pa, floor](ValueNode& self) {
    if (!pa->requires_grad) return;
    for (std::size_t i = 0; i < self.data.size(); ++i)
      if (pa->data[i] >= floor) pa->grad[i] += self.grad[i];
  });
}

Value matmul(const Value& a, const Value& b) {
  const Array& da = a.data();
  const Array& db = b.data();
  if (da.rank() != 2 || db.rank() != 2 || da.shape()[1] != db.shape()[0])
    throw ShapeError("matmul: incompatible shapes " + da.shape_str() + " and " + db.shape_str());
  const std::size_t m = da.shape()[0], k = da.shape()[1], n = db.shape()[1];
  Array out({m, n});
  {
    const double* pa = da.data();
    const double* pb = db.data();
    double* po = out.data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double aik = pa[i * k + kk];
        if (aik == 0.0) continue;
        const double* brow = pb + kk * n;
        double* orow = po + i * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
      }
  }
  ValueNode* na = a.node().get();
  ValueNode* nb = b.node().get();
  return make_node(std::move(out), {a, b}, [na, nb, m, k, n](ValueNode& self) {
    const double* g = self.grad.data();
    if (na->requires_grad) {
      // dA = g . B^T
      double* ga = na->grad.data();
      const double* pb = nb->data.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t kk = 0; kk < k; ++kk) {
          double acc = 0.0;
          const double* grow = g + i * n;
          const double* brow = pb + kk * n;
          for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
          ga[i * k + kk] += acc;
        }
    }
    if (nb->requires_grad) {
      // dB = A^T . g
      double* gb = nb->grad.data();
      const double* pa = na->data.data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t kk = 0; kk < k; ++kk) {
          const double aik = pa[i * k + kk];
          if (aik == 0.0) continue;
          const double* grow = g + i * n;
          double* gbrow = gb + kk * n;
          for (std::size_t j = 0; j < n; ++j) gbrow[j] += aik * grow[j];
        }
    }
  });
}

Value transpose(const Value& a) {
  const Array& da = a.data();
  if (da.rank() != 2) throw ShapeError("transpose: expected rank-2, got " + da.shape_str());
  const std::size_t m = da.shape()[0], n = da.shape()[1];
  Array out({n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(j, i) = da.at(i, j);
  ValueNode* pa = a.node().get();
  return make_node(std::move(out), {a}, [pa, m, n](ValueNode& self) {
    if (!pa->requires_grad) return;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) pa->grad[i * n + j] += self.grad[j * m + i];
  });
}

Value segment_sum(const Value& values, const std::vector<std::size_t>& segment_ids,
                  std::size_t num_segments) {
  const Array& in = values.data();
  if (segment_ids.size() != in.rows())
    throw ShapeError("segment_sum: " + std::to_string(segment_ids.size()) + " ids for " +
                     std::to_string(in.rows()) + " rows");
  for (std::size_t id : segment_ids)
    if (id >= num_segments)
      throw IndexError("segment_sum: segment id " + std::to_string(id) + " out of range [0, " +
                       std::to_string(num_segments) + ")");
  std::vector<std::size_t> out_shape = in.shape();
  if (out_shape.empty()) out_shape = {num_segments};
  else out_shape[0] = num_segments;
  const std::size_t d = in.row_size();
  Array out(out_shape);
  for (std::size_t r = 0; r < in.rows(); ++r) {
    const double* src = in.data() + r * d;
    double* dst = out.data() + segment_ids[r] * d;
    for (std::size_t c = 0; c < d; ++c) dst[c] += src[c];
  }
  ValueNode* pv = values.node().get();
  auto ids = segment_ids;
  return make_node(std::move(out), {values}, [pv, ids = std::move(ids), d](ValueNode& self) {
    if (!pv->requires_grad) return;
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const double* g = self.grad.data() + ids[r] * d;
      double* dst = pv->grad.data() + r * d;
      for (std::size_t c = 0; c < d; ++c) dst[c] += g[c];
    }
  });
}

Value gather_rows(const Value& values, const std::vector<std::size_t>& indices) {
  const Array& in = values.data();
  const std::size_t rows = in.rows();
  for (std::size_t idx : indices)
    if (idx >= rows)
      throw IndexError("gather_rows: index " + std::to_string(idx) + " out of range [0, " +
                       std::to_string(rows) + ")");
  std::vector<std::size_t> out_shape = in.shape();
  if (out_shape.empty()) out_shape = {indices.size()};
  else out_shape[0] = indices.size();
  const std::size_t d = in.row_size();
  Array out(out_shape);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const double* src = in.data() + indices[r] * d;
    double* dst = out.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) dst[c] = src[c];
  }
  ValueNode* pv = values.node().get();
  auto idxs = indices;
  return make_node(std::move(out), {values}, [pv, idxs = std::move(idxs), d](ValueNode& self) {
    if (!pv->requires_grad) return;
    for (std::size_t r = 0; r < idxs.size(); ++r) {
      const double* g = self.grad.data() + r * d;
      double* dst = pv->grad.data() + idxs[r] * d;
      for (std::size_t c = 0; c < d; ++c) dst[c] += g[c];
    }
  });
}

Value scale_rows(const Value& m, const Value& scales) {
  const Array& dm = m.data();
  const Array& ds = scales.data();
  if (ds.size() != dm.rows())
    throw ShapeError("scale_rows: " + std::to_string(ds.size()) + " scales for " +
                     std::to_string(dm.rows()) + " rows");
  const std::size_t d = dm.row_size();
  Array out = Array::zeros_like(dm);
  for (std::size_t r = 0; r < dm.rows(); ++r) {
    const double s = ds[r];
    const double* src = dm.data() + r * d;
    double* dst = out.data() + r * d;
    for (std::size_t c = 0; c < d; ++c) dst[c] = src[c] * s;
  }
  ValueNode* pm = m.node().get();
  ValueNode* ps = scales.node().get();
  const std::size_t rows = dm.rows();
  return make_node(std::move(out), {m, scales}, [pm, ps, rows, d](ValueNode& self) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double* g = self.grad.data() + r * d;
      const double s = ps->data[r];
      if (pm->requires_grad) {
        double* gm = pm->grad.data() + r * d;
        for (std::size_t c = 0; c < d; ++c) gm[c] += g[c] * s;
      }
      if (ps->requires_grad) {
        const double* x = pm->data.data() + r * d;
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) acc += g[c] * x[c];
        ps->grad[r] += acc;
      }
    }
  });
}

namespace {

void check_rowvec(const Array& m, const Array& row, const char* what) {
  if (row.size() != m.row_size())
    throw ShapeError(std::string(what) + ": row vector " + row.shape_str() +
                     " does not match matrix " + m.shape_str());
}

}  // namespace

Value add_rowvec(const Value& m, const Value& row) {
  check_rowvec(m.data(), row.data(), "add_rowvec");
  const Array& dm = m.data();
  const Array& dr = row.data();
  const std::size_t d = dm.row_size();
  Array out = Array::zeros_like(dm);
  for (std::size_t r = 0; r < dm.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) out[r * d + c] = dm[r * d + c] + dr[c];
  ValueNode* pm = m.node().get();
  ValueNode* pr = row.node().get();
  const std::size_t rows = dm.rows();
  return make_node(std::move(out), {m, row}, [pm, pr, rows, d](ValueNode& self) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        const double g = self.grad[r * d + c];
        if (pm->requires_grad) pm->grad[r * d + c] += g;
        if (pr->requires_grad) pr->grad[c] += g;
      }
  });
}

Value mul_rowvec(const Value& m, const Value& row) {
  check_rowvec(m.data(), row.data(), "mul_rowvec");
  const Array& dm = m.data();
  const Array& dr = row.data();
  const std::size_t d = dm.row_size();
  Array out = Array::zeros_like(dm);
  for (std::size_t r = 0; r < dm.rows(); ++r)
    for (std::size_t c = 0; c < d; ++c) out[r * d + c] = dm[r * d + c] * dr[c];
  ValueNode* pm = m.node().get();
  ValueNode* pr = row.node().get();
  const std::size_t rows = dm.rows();
  return make_node(std::move(out), {m, row}, [pm, pr, rows, d](ValueNode& self) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        const double g = self.grad[r * d + c];
        if (pm->requires_grad) pm->grad[r * d + c] += g * pr->data[c];
        if (pr->requires_grad) pr->grad[c] += g * pm->data[r * d + c];
      }
  });
}

Value concat_cols(const Value& a, const Value& b) {
  const Array& da = a.data();
  const Array& db = b.data();
  if (da.rank() != 2 || db.rank() != 2 || da.shape()[0] != db.shape()[0])
    throw ShapeError("concat_cols: incompatible shapes " + da.shape_str() + " and " +
                     db.shape_str());
  const std::size_t n = da.shape()[0], ca = da.shape()[1], cb = db.shape()[1];
  Array out({n, ca + cb});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < ca; ++c) out.at(r, c) = da.at(r, c);
    for (std::size_t c = 0; c < cb; ++c) out.at(r, ca + c) = db.at(r, c);
  }
  ValueNode* pa = a.node().get();
  ValueNode* pb = b.node().get();
  return make_node(std::move(out), {a, b}, [pa, pb, n, ca, cb](ValueNode& self) {
    for (std::size_t r = 0; r < n; ++r) {
      if (pa->requires_grad)
        for (std::size_t c = 0; c < ca; ++c) pa->grad[r * ca + c] += self.grad[r * (ca + cb) + c];
      if (pb->requires_grad)
        for (std::size_t c = 0; c < cb; ++c)
          pb->grad[r * cb + c] += self.grad[r * (ca + cb) + ca + c];
    }
  });
}

Value concat_rows(const Value& a, const Value& b) {
  const Array& da = a.data();
  const Array& db = b.data();
  if (da.rank() != 2 || db.rank() != 2 || da.shape()[1] != db.shape()[1])
    throw ShapeError("concat_rows: incompatible shapes " + da.shape_str() + " and " +
                     db.shape_str());
  const std::size_t na = da.shape()[0], nb = db.shape()[0], d = da.shape()[1];
  Array out({na + nb, d});
  for (std::size_t i = 0; i < da.size(); ++i) out[i] = da[i];
  for (std::size_t i = 0; i < db.size(); ++i) out[na * d + i] = db[i];
  ValueNode* pa = a.node().get();
  ValueNode* pb = b.node().get();
  return make_node(std::move(out), {a, b}, [pa, pb, na, nb, d](ValueNode& self) {
    if (pa->requires_grad)
      for (std::size_t i = 0; i < na * d; ++i) pa->grad[i] += self.grad[i];
    if (pb->requires_grad)
      for (std::size_t i = 0; i < nb * d; ++i) pb->grad[i] += self.grad[na * d + i];
  });
}

Value select_col(const Value& m, std::size_t col) {
  const Array& dm = m.data();
  if (dm.rank() != 2 || col >= dm.shape()[1])
    throw ShapeError("select_col: column " + std::to_string(col) + " of " + dm.shape_str());
  const std::size_t n = dm.shape()[0], d = dm.shape()[1];
  Array out({n});
  for (std::size_t r = 0; r < n; ++r) out[r] = dm.at(r, col);
  ValueNode* pm = m.node().get();
  return make_node(std::move(out), {m}, [pm, col, n, d](ValueNode& self) {
    if (!pm->requires_grad) return;
    for (std::size_t r = 0; r < n; ++r) pm->grad[r * d + col] += self.grad[r];
  });
}

Value sum_all(const Value& a) {
  Array out = Array::scalar(a.data().sum());
  ValueNode* pa = a.node().get();
  return make_node(std::move(out), {a}, [pa](ValueNode& self) {
    if (!pa->requires_grad) return;
    const double g = self.grad[0];
    for (std::size_t i = 0; i < pa->grad.size(); ++i) pa->grad[i] += g;
  });
}

Value mean_all(const Value& a) {
  const std::size_t n = a.size();
  if (n == 0) throw ContractError("mean_all: empty input");
  Array out = Array::scalar(a.data().sum() / static_cast<double>(n));
  ValueNode* pa = a.node().get();
  return make_node(std::move(out), {a}, [pa, n](ValueNode& self) {
    if (!pa->requires_grad) return;
    const double g = self.grad[0] / static_cast<double>(n);
    for (std::size_t i = 0; i < pa->grad.size(); ++i) pa->grad[i] += g;
  });
}

Value reshape(const Value& a, std::vector<std::size_t> shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  if (n != a.size())
    throw ShapeError("reshape: cannot view " + a.data().shape_str() + " as " +
                     Array(shape).shape_str());
  Array out(std::move(shape));
  for (std::size_t i = 0; i < n; ++i) out[i] = a.data()[i];
  ValueNode* pa = a.node().get();
  return make_node(std::move(out), {a}, [pa](ValueNode& self) {
    if (!pa->requires_grad) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i];
  });
}

Value straight_through(const Value& soft, Array hard) {
  if (!hard.same_shape(soft.data()))
    throw ShapeError("straight_through: hard values " + hard.shape_str() +
                     " do not match soft sample " + soft.data().shape_str());
  ValueNode* ps = soft.node().get();
  return make_node(std::move(hard), {soft}, [ps](ValueNode& self) {
    if (!ps->requires_grad) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) ps->grad[i] += self.grad[i];
  });
}

}  // namespace hagcl
