#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "hagcl/graph.hpp"
#include "hagcl/ops.hpp"
#include "hagcl/rng.hpp"
#include "hagcl/value.hpp"

namespace testutil {

// Relative error with the denominator floored at 1e-6.
inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

// Uniform array in [lo, hi].
inline hagcl::Array random_array(std::vector<std::size_t> shape, std::uint64_t seed,
                                 double lo = -2.0, double hi = 2.0) {
  hagcl::Array a(std::move(shape));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = hagcl::rng::uniform_in(seed, i, lo, hi);
  return a;
}

// Uniform array with |value| in [0.1, 2]; keeps finite differences away from
// the kinks of relu/clamp.
inline hagcl::Array random_array_away_from_zero(std::vector<std::size_t> shape,
                                                std::uint64_t seed) {
  hagcl::Array a(std::move(shape));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double mag = hagcl::rng::uniform_in(seed, 2 * i, 0.1, 2.0);
    a[i] = hagcl::rng::uniform(seed, 2 * i + 1) < 0.5 ? -mag : mag;
  }
  return a;
}

// Central-difference gradient of an independently re-evaluated scalar
// function; `x` is perturbed in place and restored.
template <typename F>
hagcl::Array fd_gradient(F&& scalar_fn, hagcl::Array& x, double h = 1e-5) {
  hagcl::Array g = hagcl::Array::zeros_like(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double fp = scalar_fn();
    x[i] = orig - h;
    const double fm = scalar_fn();
    x[i] = orig;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Runs backward through a freshly built scalar loss and compares every
// input's gradient against central finite differences.  `build` must
// construct a new graph from the inputs' current data on every call.
// Returns the max relative error over all inputs and elements.
inline double gradient_check(const std::function<hagcl::Value()>& build,
                             std::vector<hagcl::Value> inputs, double h = 1e-5) {
  hagcl::Value loss = build();
  hagcl::backward(loss);
  std::vector<hagcl::Array> analytic;
  analytic.reserve(inputs.size());
  for (auto& in : inputs) analytic.push_back(in.grad());

  double worst = 0.0;
  const auto eval = [&build]() { return build().data()[0]; };
  for (std::size_t p = 0; p < inputs.size(); ++p) {
    hagcl::Array& x = inputs[p].mutable_data();
    const hagcl::Array numeric = fd_gradient(eval, x, h);
    for (std::size_t i = 0; i < numeric.size(); ++i)
      worst = std::max(worst, rel_err(analytic[p][i], numeric[i]));
  }
  return worst;
}

// Random scalar projection: sum(out * fixed random weights).  Small weights
// keep the scalar's magnitude low so central-difference roundoff noise stays
// well under the 1e-6 denominator floor.
inline hagcl::Value project(const hagcl::Value& out, std::uint64_t seed) {
  return hagcl::sum_all(hagcl::mul(
      out, hagcl::Value::constant(random_array(out.data().shape(), seed, -0.05, 0.05))));
}

// Planted two-class dataset: class 0 = ring topology with a (1,0)-leaning
// feature pattern, class 1 = complete topology leaning (0,1); both with
// seeded feature noise.  Both the edge structure and the features carry the
// label signal.
inline std::vector<hagcl::Graph> make_planted_dataset(std::size_t num_graphs,
                                                      std::uint64_t seed) {
  std::vector<hagcl::Graph> graphs;
  graphs.reserve(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    const int label = static_cast<int>(g % 2);
    const std::uint64_t gseed = hagcl::rng::derive(seed, 0xd5, g);
    const std::size_t n = 6 + static_cast<std::size_t>(hagcl::rng::bounded(gseed, 0, 5));
    hagcl::Graph graph;
    graph.label = label;
    graph.graph_id = g;
    graph.node_features = hagcl::Array({n, 2});
    for (std::size_t v = 0; v < n; ++v) {
      const double n1 = hagcl::rng::uniform_in(gseed, 100 + 2 * v, -0.3, 0.3);
      const double n2 = hagcl::rng::uniform_in(gseed, 101 + 2 * v, -0.3, 0.3);
      graph.node_features.at(v, 0) = (label == 0 ? 1.0 : 0.0) + n1;
      graph.node_features.at(v, 1) = (label == 1 ? 1.0 : 0.0) + n2;
    }
    if (label == 0) {
      for (std::size_t v = 0; v < n; ++v) {
        const std::size_t u = (v + 1) % n;
        graph.arcs.emplace_back(v, u);
        graph.arcs.emplace_back(u, v);
      }
    } else {
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = v + 1; u < n; ++u) {
          graph.arcs.emplace_back(v, u);
          graph.arcs.emplace_back(u, v);
        }
    }
    graphs.push_back(std::move(graph));
  }
  return graphs;
}

}  // namespace testutil
