#pragma once

// Dense float64 tensors with a reverse-mode tape.
//
// A Tensor is a cheap handle onto a shared node. Ops build new nodes that
// remember their parents and a backward closure; run_backward() walks the
// graph in reverse topological order. Values are never mutated after an op
// writes them, except for leaf parameters updated by the optimizer.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tploc {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  const char* op = "leaf";
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad and accumulates into parents[i]->grad.
  std::function<void(Node&)> backward;
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(const Shape& shape, bool requires_grad = false);
  static Tensor filled(const Shape& shape, double value);
  static Tensor scalar(double value, bool requires_grad = false);
  static Tensor vector(std::vector<double> values, bool requires_grad = false);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values,
                       bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> values() const;
  double item() const;
  double operator[](std::size_t flat) const { return values()[flat]; }
  double at(std::size_t row, std::size_t col) const;

  // Only valid on leaves (parameters, gradient-check inputs).
  std::span<double> mutable_values();

  bool requires_grad() const;
  std::span<const double> grad() const;

  /// Same values, no graph history.
  Tensor detach() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }

  /// Builds an op output. Parents that do not require grad are dropped; if none
  /// remain the result is a constant and `backward` is discarded.
  static Tensor from_op(const char* op, Shape shape, std::vector<double> values,
                        std::vector<Tensor> parents, std::function<void(detail::Node&)> backward);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

/// Populates grad on every requires_grad node reachable from `loss`.
/// Throws ContractViolation for non-scalar loss, NumericError for NaN/Inf loss.
void run_backward(const Tensor& loss);

}  // namespace tploc
