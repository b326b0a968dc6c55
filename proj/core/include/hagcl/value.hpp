#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "hagcl/array.hpp"

namespace hagcl {

namespace detail {

// One node in the reverse-mode computation graph.
//
// Invariants:
//  - grad, when allocated, has the same shape as data;
//  - the parent links form a DAG;
//  - gradient accumulation is additive: a node consumed k times receives
//    the sum of k contributions.
struct ValueNode {
  Array data;
  Array grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<ValueNode>> parents;
  // Reads this node's grad and accumulates contributions into the parents.
  std::function<void(ValueNode&)> backward_rule;

  bool grad_allocated() const { return grad.same_shape(data) && grad.size() == data.size(); }
  void ensure_grad() {
    if (!grad_allocated()) grad = Array::zeros_like(data);
  }
};

}  // namespace detail

// Handle to a node in a dynamically built computation graph.  Copying a
// Value copies the handle; the underlying array is shared.
class Value {
public:
  Value() = default;
  explicit Value(std::shared_ptr<detail::ValueNode> node) : node_(std::move(node)) {}

  // Leaf that does not track gradients.
  static Value constant(Array data);
  // Trainable leaf; its gradient buffer is allocated (zeroed) up front.
  static Value param(Array data);
  static Value scalar(double v) { return constant(Array::scalar(v)); }

  bool defined() const { return node_ != nullptr; }
  const Array& data() const;
  Array& mutable_data();
  const Array& grad() const;
  Array& mutable_grad();
  bool requires_grad() const;

  const std::vector<std::size_t>& shape() const { return data().shape(); }
  std::size_t size() const { return data().size(); }

  const std::shared_ptr<detail::ValueNode>& node() const { return node_; }

private:
  std::shared_ptr<detail::ValueNode> node_;
};

// Reverse-mode sweep from a scalar root.  Zeroes the gradients of every
// reachable node first, then accumulates d(root)/d(node) into each reachable
// node with requires_grad.  Visits each node exactly once, in reverse
// topological order.
void backward(const Value& root);

}  // namespace hagcl
