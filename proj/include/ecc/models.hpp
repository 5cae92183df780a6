#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ecc/config.hpp"
#include "ecc/layers.hpp"
#include "ecc/tensor.hpp"

namespace ecc {

// A sequential classifier whose last layer emits logits. Taps are layer
// indices whose post-activation outputs may be exported.
struct ModelSpec {
  std::string name;
  Layers layers;
  std::size_t num_classes = 0;
  std::size_t normal_class = 0;
  std::vector<std::size_t> taps;

  void validate() const;
  std::size_t input_dim() const;
  // Width of the activation after layer `tap`.
  std::size_t tap_dim(std::size_t tap) const;
  bool has_tap(std::size_t tap) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Maps an edge tap-m activation into the cloud's tap-n space: one dense
// projection followed by `blocks` square residual blocks.
struct AdapterSpec {
  std::size_t edge_tap = 0;
  std::size_t cloud_tap = 0;
  Layers layers;

  static AdapterSpec make(std::size_t edge_tap, std::size_t cloud_tap, std::size_t edge_dim,
                          std::size_t cloud_dim, std::size_t blocks, Activation block_activation);

  std::size_t blocks() const { return layers.empty() ? 0 : layers.size() - 1; }
  std::size_t input_dim() const;
  std::size_t output_dim() const;
  void validate() const;
  // Checks the adapter fits between tap m of `edge` and tap n of `cloud`.
  void validate_against(const ModelSpec& edge, const ModelSpec& cloud) const;

  friend bool operator==(const AdapterSpec&, const AdapterSpec&) = default;
};

inline constexpr std::size_t kMaxAdapterBlocks = 4;

struct FeatureMap {
  Tensor values;
  std::string producer;
  std::size_t tap = 0;
};

struct TapOutput {
  Tensor probs;
  FeatureMap feature;
};

// Row-wise softmax with max subtraction; rank-1 input gives rank-1 output.
Tensor softmax(const Tensor& logits);

Tensor infer(const ModelSpec& model, const Tensor& input);
TapOutput infer_with_tap(const ModelSpec& model, const Tensor& input, std::size_t tap);
FeatureMap adapt(const AdapterSpec& adapter, const FeatureMap& edge_feature);
// Runs only layers with index > from_tap on `injected` and returns probabilities.
Tensor cloud_tail(const ModelSpec& model, const FeatureMap& injected, std::size_t from_tap);

enum class ConfidenceMode { kNormalClass, kMaxClass };
ConfidenceMode parse_confidence_mode(std::string_view text);
std::string_view to_string(ConfidenceMode mode);

double confidence(std::span<const double> probs, std::size_t normal_class, ConfidenceMode mode);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

// Dense MLP: hidden layers use relu, the classifier head is identity. All
// hidden layer indices are declared as taps.
ModelSpec make_mlp(std::string name, std::size_t input_dim, std::span<const std::size_t> hidden,
                   std::size_t num_classes, std::size_t normal_class);

void init_model(ModelSpec& model, std::mt19937_64& rng);
void init_adapter(AdapterSpec& adapter, std::mt19937_64& rng);

// Structured-text model definition (JSON):
//   {"name": "edge", "input_dim": 16, "num_classes": 7, "normal_class": 0,
//    "taps": [0], "layers": [{"kind": "dense", "out": 8, "activation": "relu"}, ...]}
ModelSpec model_from_json(const config::Json& def, const std::string& path);
config::Json model_to_json(const ModelSpec& model);

void save_model(const std::filesystem::path& path, const ModelSpec& model);
ModelSpec load_model(const std::filesystem::path& path);
void save_adapter(const std::filesystem::path& path, const AdapterSpec& adapter);
AdapterSpec load_adapter(const std::filesystem::path& path);

}  // namespace ecc
