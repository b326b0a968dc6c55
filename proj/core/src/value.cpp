#include "hagcl/value.hpp"

#include <unordered_set>

#include "hagcl/error.hpp"

namespace hagcl {

Value Value::constant(Array data) {
  auto node = std::make_shared<detail::ValueNode>();
  node->data = std::move(data);
  node->requires_grad = false;
  return Value(std::move(node));
}

Value Value::param(Array data) {
  auto node = std::make_shared<detail::ValueNode>();
  node->data = std::move(data);
  node->requires_grad = true;
  node->ensure_grad();
  return Value(std::move(node));
}

const Array& Value::data() const {
  if (!node_) throw ContractError("Value: access to an undefined value");
  return node_->data;
}

Array& Value::mutable_data() {
  if (!node_) throw ContractError("Value: access to an undefined value");
  return node_->data;
}

const Array& Value::grad() const {
  if (!node_) throw ContractError("Value: access to an undefined value");
  if (!node_->grad_allocated()) throw ContractError("Value: gradient not allocated");
  return node_->grad;
}

Array& Value::mutable_grad() {
  if (!node_) throw ContractError("Value: access to an undefined value");
  node_->ensure_grad();
  return node_->grad;
}

bool Value::requires_grad() const { return node_ && node_->requires_grad; }

void backward(const Value& root) {
  if (!root.defined()) throw ContractError("backward: undefined root");
  if (root.size() != 1)
    throw ContractError("backward: root must be scalar, got shape " + root.data().shape_str());

  // Iterative post-order DFS; `order` ends up topologically sorted with the
  // root last.
  std::vector<detail::ValueNode*> order;
  std::unordered_set<detail::ValueNode*> visited;
  struct Frame {
    detail::ValueNode* node;
    std::size_t next_parent;
  };
  std::vector<Frame> stack;
  detail::ValueNode* root_node = root.node().get();
  if (visited.insert(root_node).second) stack.push_back({root_node, 0});
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next_parent < top.node->parents.size()) {
      detail::ValueNode* parent = top.node->parents[top.next_parent++].get();
      if (visited.insert(parent).second) stack.push_back({parent, 0});
    } else {
      order.push_back(top.node);
      stack.pop_back();
    }
  }

  for (detail::ValueNode* n : order) {
    if (n->requires_grad) {
      n->ensure_grad();
      n->grad.fill(0.0);
    }
  }
  if (!root_node->requires_grad) return;  // nothing reachable tracks gradients
  root_node->grad[0] = 1.0;

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::ValueNode* n = *it;
    if (n->requires_grad && n->backward_rule) n->backward_rule(*n);
  }
}

}  // namespace hagcl
