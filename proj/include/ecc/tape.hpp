#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ecc/tensor.hpp"

namespace ecc {

// Probabilities entering a logarithm are clamped to [kProbEpsilon, 1 - kProbEpsilon].
inline constexpr double kProbEpsilon = 1e-12;

// Records the primitive operations of one forward pass so that adjoints can be
// replayed. Leaves are either constants or named variables; backward() returns
// one gradient per variable name. Single-owner, not thread safe.
class GradientTape {
 public:
  using Node = std::size_t;

  Node constant(Tensor value);
  Node variable(Tensor value, std::string name);

  // x: (batch, in), weight: (out, in), bias: (out) -> (batch, out)
  Node linear(Node x, Node weight, Node bias);
  Node relu(Node x);
  Node add(Node a, Node b);
  Node scale(Node a, double factor);
  // Inner product of two equally shaped tensors; scalar result.
  Node dot(Node a, Node b);
  // Σ weights[i] * scalars[i]; scalar result.
  Node weighted_sum(std::span<const Node> scalars, std::span<const double> weights);

  // Mean over rows with include[r] of -log(clamp(softmax(logits)[r][labels[r]])).
  // Evaluates to 0 when no row is included.
  Node softmax_cross_entropy(Node logits, std::vector<std::size_t> labels,
                             std::vector<char> include);
  // Mean elementwise binary cross-entropy between p = σ(target) and
  // q = clamp(σ(prediction)).
  Node sigmoid_bce(Node target, Node prediction);

  const Tensor& value(Node n) const { return nodes_.at(n).value; }
  bool requires_grad(Node n) const { return nodes_.at(n).requires_grad; }
  std::size_t size() const { return nodes_.size(); }
  Node last() const;

 private:
  enum class Op { kConstant, kVariable, kLinear, kRelu, kAdd, kScale, kDot, kWeightedSum, kSoftmaxCe, kSigmoidBce };

  struct Entry {
    Op op;
    Tensor value;
    std::vector<Node> inputs;
    bool requires_grad = false;
    std::string name;             // kVariable
    std::vector<double> coeffs;   // kScale, kWeightedSum
    std::vector<std::size_t> labels;  // kSoftmaxCe
    std::vector<char> include;        // kSoftmaxCe
    Tensor cache;                     // kSoftmaxCe: probabilities
  };

  Node push(Entry e);

  std::vector<Entry> nodes_;

  friend std::map<std::string, Tensor> backward(const GradientTape&, Node, double);
};

using Gradients = std::map<std::string, Tensor>;

// Reverse pass from the last recorded node, which must be a scalar.
Gradients backward(const GradientTape& tape, double loss_adjoint = 1.0);
// Reverse pass from an explicit scalar root.
Gradients backward(const GradientTape& tape, GradientTape::Node root, double loss_adjoint = 1.0);

double sigmoid(double x);

// Kernels shared by the tape and tape-free evaluation so both paths agree bit for bit.
Tensor linear_forward(const Tensor& x, const Tensor& weight, const Tensor& bias);
Tensor relu_forward(Tensor x);

}  // namespace ecc
