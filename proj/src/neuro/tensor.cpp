#include "radsr/neuro/tensor.hpp"

#include <atomic>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace radsr::neuro {

namespace {
std::atomic<bool> g_nan_check{false};
}

void set_nan_check(bool enabled) { g_nan_check = enabled; }
bool nan_check_enabled() { return g_nan_check; }

std::size_t numel(const Shape& s) {
  std::size_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

std::string to_string(const Shape& s) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << "]";
  return os.str();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double v, bool requires_grad) {
  auto n = std::make_shared<Node>();
  n->value.assign(numel(shape), v);
  n->shape = std::move(shape);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  if (values.size() != numel(shape))
    throw std::invalid_argument("tensor of shape " + to_string(shape) + " given " +
                                std::to_string(values.size()) + " values");
  auto n = std::make_shared<Node>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  n->requires_grad = requires_grad;
  return Tensor(std::move(n));
}

double Tensor::item() const {
  if (size() != 1) throw std::logic_error("item() on tensor of shape " + to_string(shape()));
  return node_->value[0];
}

void Tensor::zero_grad() const { node_->grad.assign(node_->value.size(), 0.0); }

Tensor Tensor::detach() const { return from(shape(), node_->value, false); }

void Tensor::backward() const {
  if (size() != 1) throw std::logic_error("backward() needs a single-element tensor, got " + to_string(shape()));
  if (!requires_grad()) return;

  // iterative post-order DFS gives a topological order
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{node_.get(), 0}};
  seen.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->parents.size()) {
      Node* p = n->parents[next++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && !n->grad.empty()) n->backward_fn(*n);
  }
}

}  // namespace radsr::neuro
