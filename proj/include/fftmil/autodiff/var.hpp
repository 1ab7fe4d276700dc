#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fftmil::ad {

using Shape = std::vector<int>;

std::size_t numel(const Shape& s);
std::string shape_string(const Shape& s);

template <class T>
struct Node {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // sized lazily during backward
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  std::span<T> ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T(0));
    return grad;
  }
};

/// Handle to a node of the dynamic tape. Copies share the node. Operations
/// record a backward closure on their output; backward() walks the graph
/// reachable from a scalar result in reverse topological order.
template <class T>
class Var {
 public:
  Var() = default;

  static Var constant(Shape shape, std::vector<T> values);
  static Var zeros(Shape shape, bool requires_grad = false);
  static Var leaf(Shape shape, std::vector<T> values, bool requires_grad);

  /// Output of an operation. requires_grad is inherited from the parents;
  /// `backward` is dropped when no parent needs a gradient.
  static Var result(Shape shape, std::vector<T> values, std::vector<Var> parents,
                    std::function<void(Node<T>&)> backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int dim(int i) const { return node_->shape.at(static_cast<std::size_t>(i)); }
  int rank() const { return static_cast<int>(node_->shape.size()); }
  std::size_t size() const { return node_->value.size(); }

  std::span<const T> value() const { return node_->value; }
  std::span<T> mutable_value() { return node_->value; }
  /// Empty until backward() has touched this node.
  std::span<const T> grad() const { return node_->grad; }
  std::span<T> ensure_grad() { return node_->ensure_grad(); }
  bool requires_grad() const { return node_->requires_grad; }
  void zero_grad() { node_->grad.assign(node_->value.size(), T(0)); }

  Node<T>* node() const { return node_.get(); }
  const std::shared_ptr<Node<T>>& shared() const { return node_; }

 private:
  explicit Var(std::shared_ptr<Node<T>> n) : node_(std::move(n)) {}
  std::shared_ptr<Node<T>> node_;
};

/// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every reachable
/// node that requires them. `loss` must hold exactly one element.
template <class T>
void backward(const Var<T>& loss);

/// Named trainable tensor.
template <class T>
struct Parameter {
  std::string name;
  Var<T> var;
};

/// Ordered collection of uniquely named parameters belonging to one model.
template <class T>
class ParameterSet {
 public:
  Var<T> add(const std::string& name, Shape shape, std::vector<T> init);
  Var<T> add_zeros(const std::string& name, Shape shape);

  const std::vector<Parameter<T>>& items() const { return items_; }
  std::vector<Parameter<T>>& items() { return items_; }
  const Parameter<T>* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }
  std::size_t count() const;  // total element count
  void zero_grad();

  /// Copies values (not nodes) so that a snapshot can be restored later.
  std::vector<std::vector<T>> snapshot() const;
  void restore(const std::vector<std::vector<T>>& values);

 private:
  std::vector<Parameter<T>> items_;
};

}  // namespace fftmil::ad
