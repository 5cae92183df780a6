#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecc/tape.hpp"
#include "ecc/tensor.hpp"

namespace ecc {

enum class LayerKind { kDense, kResidual };
enum class Activation { kRelu, kIdentity };

std::string_view to_string(LayerKind kind);
std::string_view to_string(Activation act);
LayerKind parse_layer_kind(std::string_view text);
Activation parse_activation(std::string_view text);

// One sequential layer.
//   dense:    y = act(W x + b)                      params {W (out x in), b (out)}
//   residual: y = act(x + W2 relu(W1 x + b1) + b2)  params {W1, b1, W2, b2}, all square
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  Activation activation = Activation::kIdentity;
  std::vector<Tensor> params;

  // Zero-initialised parameters of the right shapes.
  static LayerSpec dense(std::size_t in_dim, std::size_t out_dim, Activation act);
  static LayerSpec residual(std::size_t dim, Activation act);

  // Throws ConfigError mentioning `index` when dims or parameter shapes are inconsistent.
  void validate(std::size_t index) const;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

using Layers = std::vector<LayerSpec>;

// Validates every layer and the dimension chain between consecutive layers.
void validate_chain(std::span<const LayerSpec> layers, std::size_t first_index = 0);

// Kaiming-style uniform init, bound sqrt(6 / in_dim); biases zero.
void init_layers(std::span<LayerSpec> layers, std::mt19937_64& rng);

// Applies `layers` to `input` ((batch, in) or a single (in) vector). When a
// tape is given the input is recorded as variable "input" and the parameters
// as variables named param_name("", layer, k).
Tensor forward(std::span<const LayerSpec> layers, const Tensor& input, GradientTape* tape = nullptr);

// Records layers onto an existing tape starting from node `x`. Layer i of the
// span is named with index first_index + i. Parameters become variables when
// `trainable`, constants otherwise (no gradient flows into them).
GradientTape::Node record_layers(GradientTape& tape, std::span<const LayerSpec> layers,
                                 std::size_t first_index, GradientTape::Node x,
                                 std::string_view prefix, bool trainable);

std::string param_name(std::string_view prefix, std::size_t layer, std::size_t param);

// FLOPS convention: multiply-accumulate = 2, bias add = 1 per output,
// residual skip add = 1 per output, activations free.
std::uint64_t flops(const LayerSpec& layer);
std::uint64_t flops(std::span<const LayerSpec> layers);

// Plain SGD step on every parameter that has an entry in `grads`.
void apply_sgd(std::span<LayerSpec> layers, std::size_t first_index, std::string_view prefix,
               const Gradients& grads, double learning_rate);

// FNV-1a over dims and the bit patterns of every parameter.
std::uint64_t parameter_hash(std::span<const LayerSpec> layers);

}  // namespace ecc
