#include "fftmil/autodiff/var.hpp"

#include <unordered_set>

#include "fftmil/error.hpp"

namespace fftmil::ad {

std::size_t numel(const Shape& s) {
  std::size_t n = 1;
  for (int d : s) n *= static_cast<std::size_t>(d);
  return n;
}

std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

template <class T>
Var<T> Var<T>::constant(Shape shape, std::vector<T> values) {
  return leaf(std::move(shape), std::move(values), false);
}

template <class T>
Var<T> Var<T>::zeros(Shape shape, bool requires_grad) {
  const std::size_t n = numel(shape);
  return leaf(std::move(shape), std::vector<T>(n, T(0)), requires_grad);
}

template <class T>
Var<T> Var<T>::leaf(Shape shape, std::vector<T> values, bool requires_grad) {
  if (values.size() != numel(shape))
    throw InvalidArgument("tensor of shape " + shape_string(shape) + " given " +
                          std::to_string(values.size()) + " values");
  auto n = std::make_shared<Node<T>>();
  n->shape = std::move(shape);
  n->value = std::move(values);
  n->requires_grad = requires_grad;
  return Var(std::move(n));
}

template <class T>
Var<T> Var<T>::result(Shape shape, std::vector<T> values, std::vector<Var> parents,
                      std::function<void(Node<T>&)> backward_fn) {
  Var out = leaf(std::move(shape), std::move(values), false);
  for (const auto& p : parents)
    if (p.requires_grad()) out.node_->requires_grad = true;
  if (out.node_->requires_grad) {
    out.node_->parents.reserve(parents.size());
    for (auto& p : parents) out.node_->parents.push_back(p.node_);
    out.node_->backward_fn = std::move(backward_fn);
  }
  return out;
}

template <class T>
void backward(const Var<T>& loss) {
  if (loss.size() != 1) throw InvalidArgument("backward: loss must be a scalar");
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS for a topological order.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> seen;
  std::vector<std::pair<Node<T>*, std::size_t>> stack{{loss.node(), 0}};
  seen.insert(loss.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->ensure_grad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node<T>* n = *it;
    if (!n->backward_fn) continue;
    n->ensure_grad();
    for (auto& p : n->parents)
      if (p->requires_grad) p->ensure_grad();
    n->backward_fn(*n);
  }
}

template <class T>
Var<T> ParameterSet<T>::add(const std::string& name, Shape shape, std::vector<T> init) {
  if (contains(name)) throw InvalidArgument("duplicate parameter name '" + name + "'");
  Var<T> v = Var<T>::leaf(std::move(shape), std::move(init), true);
  items_.push_back({name, v});
  return v;
}

template <class T>
Var<T> ParameterSet<T>::add_zeros(const std::string& name, Shape shape) {
  const std::size_t n = numel(shape);
  return add(name, std::move(shape), std::vector<T>(n, T(0)));
}

template <class T>
const Parameter<T>* ParameterSet<T>::find(const std::string& name) const {
  for (const auto& p : items_)
    if (p.name == name) return &p;
  return nullptr;
}

template <class T>
std::size_t ParameterSet<T>::count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += p.var.size();
  return n;
}

template <class T>
void ParameterSet<T>::zero_grad() {
  for (auto& p : items_) p.var.zero_grad();
}

template <class T>
std::vector<std::vector<T>> ParameterSet<T>::snapshot() const {
  std::vector<std::vector<T>> out;
  out.reserve(items_.size());
  for (const auto& p : items_) out.emplace_back(p.var.value().begin(), p.var.value().end());
  return out;
}

template <class T>
void ParameterSet<T>::restore(const std::vector<std::vector<T>>& values) {
  if (values.size() != items_.size()) throw InvalidArgument("restore: parameter count mismatch");
  for (std::size_t i = 0; i < items_.size(); ++i) {
    auto dst = items_[i].var.mutable_value();
    if (values[i].size() != dst.size()) throw InvalidArgument("restore: size mismatch");
    std::copy(values[i].begin(), values[i].end(), dst.begin());
  }
}

template class Var<float>;
template class Var<double>;
template void backward<float>(const Var<float>&);
template void backward<double>(const Var<double>&);
template class ParameterSet<float>;
template class ParameterSet<double>;

}  // namespace fftmil::ad
