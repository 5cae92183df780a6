#include "ecc/layers.hpp"

#include <bit>
#include <cmath>

#include "ecc/errors.hpp"

namespace ecc {

std::string_view to_string(LayerKind kind) { return kind == LayerKind::kDense ? "dense" : "residual"; }
std::string_view to_string(Activation act) { return act == Activation::kRelu ? "relu" : "identity"; }

LayerKind parse_layer_kind(std::string_view text) {
  if (text == "dense") return LayerKind::kDense;
  if (text == "residual" || text == "residual-block") return LayerKind::kResidual;
  throw ConfigError("unknown layer kind '" + std::string(text) + "'");
}

Activation parse_activation(std::string_view text) {
  if (text == "relu") return Activation::kRelu;
  if (text == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + std::string(text) + "'");
}

LayerSpec LayerSpec::dense(std::size_t in_dim, std::size_t out_dim, Activation act) {
  LayerSpec l{LayerKind::kDense, in_dim, out_dim, act, {}};
  l.params = {Tensor({out_dim, in_dim}), Tensor({out_dim})};
  return l;
}

LayerSpec LayerSpec::residual(std::size_t dim, Activation act) {
  LayerSpec l{LayerKind::kResidual, dim, dim, act, {}};
  l.params = {Tensor({dim, dim}), Tensor({dim}), Tensor({dim, dim}), Tensor({dim})};
  return l;
}

void LayerSpec::validate(std::size_t index) const {
  const std::string where = "layer " + std::to_string(index);
  if (in_dim == 0 || out_dim == 0) throw ConfigError(where + ": dimensions must be positive");
  std::vector<std::vector<std::size_t>> expected;
  if (kind == LayerKind::kDense) {
    expected = {{out_dim, in_dim}, {out_dim}};
  } else {
    if (in_dim != out_dim) throw ConfigError(where + ": residual block requires in_dim == out_dim");
    expected = {{out_dim, in_dim}, {out_dim}, {out_dim, out_dim}, {out_dim}};
  }
  if (params.size() != expected.size()) {
    throw ConfigError(where + ": expected " + std::to_string(expected.size()) + " parameter tensors, got " +
                      std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].shape() != expected[k]) {
      throw ConfigError(where + ": parameter " + std::to_string(k) + " has shape " +
                        shape_string(params[k].shape()) + ", expected " + shape_string(expected[k]));
    }
  }
}

void validate_chain(std::span<const LayerSpec> layers, std::size_t first_index) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].validate(first_index + i);
    if (i > 0 && layers[i - 1].out_dim != layers[i].in_dim) {
      throw ConfigError("layer " + std::to_string(first_index + i) + ": in_dim " +
                        std::to_string(layers[i].in_dim) + " does not match previous out_dim " +
                        std::to_string(layers[i - 1].out_dim));
    }
  }
}

void init_layers(std::span<LayerSpec> layers, std::mt19937_64& rng) {
  for (auto& layer : layers) {
    for (std::size_t k = 0; k < layer.params.size(); ++k) {
      Tensor& p = layer.params[k];
      if (p.rank() == 1) {
        std::fill(p.values().begin(), p.values().end(), 0.0);
        continue;
      }
      const double bound = std::sqrt(6.0 / static_cast<double>(p.shape()[1]));
      std::uniform_real_distribution<double> dist(-bound, bound);
      for (double& v : p.values()) v = dist(rng);
    }
  }
}

namespace {

void check_input(std::span<const LayerSpec> layers, const Tensor& x, std::size_t first_index) {
  if (!layers.empty() && x.cols() != layers.front().in_dim) {
    throw ConfigError("layer " + std::to_string(first_index) + ": input has " + std::to_string(x.cols()) +
                      " features, layer expects " + std::to_string(layers.front().in_dim));
  }
}

Tensor activate(Tensor x, Activation act) { return act == Activation::kRelu ? relu_forward(std::move(x)) : x; }

}  // namespace

Tensor forward(std::span<const LayerSpec> layers, const Tensor& input, GradientTape* tape) {
  validate_chain(layers);
  Tensor x = input.as_batch();
  check_input(layers, x, 0);
  if (tape) {
    auto node = tape->variable(x, "input");
    node = record_layers(*tape, layers, 0, node, "", true);
    Tensor out = tape->value(node);
    return input.rank() == 1 ? out.reshaped({out.size()}) : out;
  }
  for (const auto& layer : layers) {
    if (layer.kind == LayerKind::kDense) {
      x = activate(linear_forward(x, layer.params[0], layer.params[1]), layer.activation);
    } else {
      Tensor inner = linear_forward(relu_forward(linear_forward(x, layer.params[0], layer.params[1])),
                                    layer.params[2], layer.params[3]);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += inner[i];
      x = activate(std::move(x), layer.activation);
    }
  }
  return input.rank() == 1 ? x.reshaped({x.size()}) : x;
}

std::string param_name(std::string_view prefix, std::size_t layer, std::size_t param) {
  std::string name(prefix);
  if (!name.empty()) name += '/';
  name += std::to_string(layer);
  name += '/';
  name += std::to_string(param);
  return name;
}

GradientTape::Node record_layers(GradientTape& tape, std::span<const LayerSpec> layers, std::size_t first_index,
                                 GradientTape::Node x, std::string_view prefix, bool trainable) {
  validate_chain(layers, first_index);
  check_input(layers, tape.value(x), first_index);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& layer = layers[i];
    std::vector<GradientTape::Node> p;
    for (std::size_t k = 0; k < layer.params.size(); ++k) {
      p.push_back(trainable ? tape.variable(layer.params[k], param_name(prefix, first_index + i, k))
                            : tape.constant(layer.params[k]));
    }
    GradientTape::Node y;
    if (layer.kind == LayerKind::kDense) {
      y = tape.linear(x, p[0], p[1]);
    } else {
      auto inner = tape.linear(tape.relu(tape.linear(x, p[0], p[1])), p[2], p[3]);
      y = tape.add(x, inner);
    }
    x = layer.activation == Activation::kRelu ? tape.relu(y) : y;
  }
  return x;
}

std::uint64_t flops(const LayerSpec& layer) {
  const std::uint64_t in = layer.in_dim, out = layer.out_dim;
  const std::uint64_t dense = 2 * in * out + out;
  return layer.kind == LayerKind::kDense ? dense : 2 * dense + out;
}

std::uint64_t flops(std::span<const LayerSpec> layers) {
  std::uint64_t total = 0;
  for (const auto& l : layers) total += flops(l);
  return total;
}

void apply_sgd(std::span<LayerSpec> layers, std::size_t first_index, std::string_view prefix,
               const Gradients& grads, double learning_rate) {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    for (std::size_t k = 0; k < layers[i].params.size(); ++k) {
      auto it = grads.find(param_name(prefix, first_index + i, k));
      if (it == grads.end()) continue;
      Tensor& p = layers[i].params[k];
      if (it->second.shape() != p.shape()) throw InvariantError("gradient shape does not match parameter");
      for (std::size_t j = 0; j < p.size(); ++j) p[j] -= learning_rate * it->second[j];
    }
  }
}

std::uint64_t parameter_hash(std::span<const LayerSpec> layers) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& l : layers) {
    mix(static_cast<std::uint64_t>(l.kind));
    mix(l.in_dim);
    mix(l.out_dim);
    mix(static_cast<std::uint64_t>(l.activation));
    for (const auto& p : l.params) {
      for (double v : p.values()) mix(std::bit_cast<std::uint64_t>(v));
    }
  }
  return h;
}

}  // namespace ecc
