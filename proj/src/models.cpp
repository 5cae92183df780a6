#include "ecc/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ecc/checkpoint.hpp"
#include "ecc/errors.hpp"

namespace ecc {

void ModelSpec::validate() const {
  if (layers.empty()) throw ConfigError("model '" + name + "': no layers");
  validate_chain(layers);
  if (num_classes == 0 || layers.back().out_dim != num_classes) {
    throw ConfigError("model '" + name + "': last layer out_dim must equal num_classes");
  }
  if (normal_class >= num_classes) throw ConfigError("model '" + name + "': normal_class out of range");
  for (auto t : taps) {
    if (t >= layers.size()) throw ConfigError("model '" + name + "': tap " + std::to_string(t) + " out of range");
  }
}

std::size_t ModelSpec::input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }

std::size_t ModelSpec::tap_dim(std::size_t tap) const {
  if (tap >= layers.size()) throw UsageError("model '" + name + "': tap " + std::to_string(tap) + " out of range");
  return layers[tap].out_dim;
}

bool ModelSpec::has_tap(std::size_t tap) const { return std::find(taps.begin(), taps.end(), tap) != taps.end(); }

AdapterSpec AdapterSpec::make(std::size_t edge_tap, std::size_t cloud_tap, std::size_t edge_dim,
                              std::size_t cloud_dim, std::size_t blocks, Activation block_activation) {
  if (blocks > kMaxAdapterBlocks) throw ConfigError("adapter: at most 4 residual blocks are supported");
  AdapterSpec a{edge_tap, cloud_tap, {}};
  a.layers.push_back(LayerSpec::dense(edge_dim, cloud_dim, Activation::kIdentity));
  for (std::size_t i = 0; i < blocks; ++i) a.layers.push_back(LayerSpec::residual(cloud_dim, block_activation));
  return a;
}

std::size_t AdapterSpec::input_dim() const { return layers.empty() ? 0 : layers.front().in_dim; }
std::size_t AdapterSpec::output_dim() const { return layers.empty() ? 0 : layers.back().out_dim; }

void AdapterSpec::validate() const {
  if (layers.empty() || layers.front().kind != LayerKind::kDense) {
    throw ConfigError("adapter: first layer must be a dense projection");
  }
  for (std::size_t i = 1; i < layers.size(); ++i) {
    if (layers[i].kind != LayerKind::kResidual) throw ConfigError("adapter: layers after the projection must be residual blocks");
  }
  if (blocks() > kMaxAdapterBlocks) throw ConfigError("adapter: at most 4 residual blocks are supported");
  validate_chain(layers);
}

void AdapterSpec::validate_against(const ModelSpec& edge, const ModelSpec& cloud) const {
  validate();
  if (!edge.has_tap(edge_tap)) throw ConfigError("adapter: edge tap " + std::to_string(edge_tap) + " is not declared");
  if (!cloud.has_tap(cloud_tap)) throw ConfigError("adapter: cloud tap " + std::to_string(cloud_tap) + " is not declared");
  if (input_dim() != edge.tap_dim(edge_tap)) throw ConfigError("adapter: projection input does not match edge tap width");
  if (output_dim() != cloud.tap_dim(cloud_tap)) throw ConfigError("adapter: output does not match cloud tap width");
}

Tensor softmax(const Tensor& logits) {
  Tensor z = logits.as_batch();
  for (std::size_t r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double denom = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      denom += v;
    }
    for (double& v : row) v /= denom;
  }
  return logits.rank() == 1 ? z.reshaped({z.size()}) : z;
}

Tensor infer(const ModelSpec& model, const Tensor& input) { return softmax(forward(model.layers, input)); }

TapOutput infer_with_tap(const ModelSpec& model, const Tensor& input, std::size_t tap) {
  if (!model.has_tap(tap)) {
    throw UsageError("model '" + model.name + "': tap " + std::to_string(tap) + " is not declared");
  }
  std::span<const LayerSpec> all(model.layers);
  Tensor feature = forward(all.first(tap + 1), input);
  Tensor logits = forward(all.subspan(tap + 1), feature);
  return {softmax(logits), FeatureMap{std::move(feature), model.name, tap}};
}

FeatureMap adapt(const AdapterSpec& adapter, const FeatureMap& edge_feature) {
  if (edge_feature.tap != adapter.edge_tap) {
    throw UsageError("adapt: feature comes from tap " + std::to_string(edge_feature.tap) + ", adapter expects " +
                     std::to_string(adapter.edge_tap));
  }
  if (edge_feature.values.cols() != adapter.input_dim()) throw ConfigError("adapt: feature width does not match projection");
  Tensor out = forward(adapter.layers, edge_feature.values);
  if (out.cols() != adapter.output_dim()) throw InvariantError("adapt: output width differs from cloud tap width");
  return FeatureMap{std::move(out), "adapter", adapter.cloud_tap};
}

Tensor cloud_tail(const ModelSpec& model, const FeatureMap& injected, std::size_t from_tap) {
  if (from_tap >= model.layers.size()) {
    throw UsageError("cloud_tail: tap " + std::to_string(from_tap) + " out of range for model '" + model.name + "'");
  }
  if (injected.values.cols() != model.tap_dim(from_tap)) {
    throw UsageError("cloud_tail: injected width " + std::to_string(injected.values.cols()) +
                     " does not match tap width " + std::to_string(model.tap_dim(from_tap)));
  }
  std::span<const LayerSpec> all(model.layers);
  return softmax(forward(all.subspan(from_tap + 1), injected.values));
}

ConfidenceMode parse_confidence_mode(std::string_view text) {
  if (text == "normal-class") return ConfidenceMode::kNormalClass;
  if (text == "max-class") return ConfidenceMode::kMaxClass;
  throw ConfigError("unknown confidence mode '" + std::string(text) + "'");
}

std::string_view to_string(ConfidenceMode mode) {
  return mode == ConfidenceMode::kNormalClass ? "normal-class" : "max-class";
}

double confidence(std::span<const double> probs, std::size_t normal_class, ConfidenceMode mode) {
  if (probs.empty()) throw UsageError("confidence: empty probability vector");
  if (mode == ConfidenceMode::kMaxClass) return *std::max_element(probs.begin(), probs.end());
  if (normal_class >= probs.size()) throw UsageError("confidence: normal class out of range");
  return probs[normal_class];
}

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

ModelSpec make_mlp(std::string name, std::size_t input_dim, std::span<const std::size_t> hidden,
                   std::size_t num_classes, std::size_t normal_class) {
  ModelSpec m{std::move(name), {}, num_classes, normal_class, {}};
  std::size_t in = input_dim;
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    m.layers.push_back(LayerSpec::dense(in, hidden[i], Activation::kRelu));
    m.taps.push_back(i);
    in = hidden[i];
  }
  m.layers.push_back(LayerSpec::dense(in, num_classes, Activation::kIdentity));
  m.validate();
  return m;
}

void init_model(ModelSpec& model, std::mt19937_64& rng) { init_layers(model.layers, rng); }
void init_adapter(AdapterSpec& adapter, std::mt19937_64& rng) { init_layers(adapter.layers, rng); }

ModelSpec model_from_json(const config::Json& def, const std::string& path) {
  using namespace config;
  ModelSpec m;
  m.name = get<std::string>(def, "name", path);
  if (m.name.empty() || m.name.find_first_of(" \t\n") != std::string::npos) {
    throw ConfigError(join(path, "name") + ": must be a non-empty token without whitespace");
  }
  std::size_t in = get<std::size_t>(def, "input_dim", path);
  m.num_classes = get<std::size_t>(def, "num_classes", path);
  m.normal_class = get_or<std::size_t>(def, "normal_class", path, 0);
  const auto& layers = child(def, "layers", path);
  if (!layers.is_array() || layers.empty()) throw ConfigError(join(path, "layers") + ": expected a non-empty array");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string lp = join(path, "layers") + "[" + std::to_string(i) + "]";
    LayerKind kind;
    Activation act;
    try {
      kind = parse_layer_kind(get_or<std::string>(layers[i], "kind", lp, "dense"));
      act = parse_activation(get_or<std::string>(layers[i], "activation", lp, "relu"));
    } catch (const ConfigError& e) {
      throw ConfigError(lp + ": " + e.what());
    }
    if (kind == LayerKind::kDense) {
      const auto out = get<std::size_t>(layers[i], "out", lp);
      if (out == 0) throw ConfigError(join(lp, "out") + ": must be positive");
      m.layers.push_back(LayerSpec::dense(in, out, act));
      in = out;
    } else {
      m.layers.push_back(LayerSpec::residual(in, act));
    }
  }
  if (def.contains("taps")) {
    const auto& taps = def["taps"];
    if (!taps.is_array()) throw ConfigError(join(path, "taps") + ": expected an array");
    for (std::size_t i = 0; i < taps.size(); ++i) {
      m.taps.push_back(as<std::size_t>(taps[i], join(path, "taps") + "[" + std::to_string(i) + "]"));
    }
  } else {
    for (std::size_t i = 0; i + 1 < m.layers.size(); ++i) m.taps.push_back(i);
  }
  try {
    m.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return m;
}

config::Json model_to_json(const ModelSpec& model) {
  config::Json layers = config::Json::array();
  for (const auto& l : model.layers) {
    config::Json j{{"kind", to_string(l.kind)}, {"activation", to_string(l.activation)}};
    if (l.kind == LayerKind::kDense) j["out"] = l.out_dim;
    layers.push_back(j);
  }
  return config::Json{{"name", model.name},       {"input_dim", model.input_dim()},
                      {"num_classes", model.num_classes}, {"normal_class", model.normal_class},
                      {"taps", model.taps},       {"layers", layers}};
}

void save_model(const std::filesystem::path& path, const ModelSpec& model) {
  model.validate();
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write checkpoint " + path.string());
  os << "ecc-checkpoint " << kCheckpointVersion << '\n';
  os << "model " << model.name << ' ' << model.num_classes << ' ' << model.normal_class << '\n';
  os << "taps " << model.taps.size();
  for (auto t : model.taps) os << ' ' << t;
  os << '\n';
  write_layers(os, model.layers);
}

ModelSpec load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read checkpoint " + path.string());
  expect_token(is, "ecc-checkpoint");
  int version = 0;
  is >> version;
  if (version != kCheckpointVersion) throw ConfigError("unsupported checkpoint version in " + path.string());
  expect_token(is, "model");
  ModelSpec m;
  std::size_t ntaps = 0;
  is >> m.name >> m.num_classes >> m.normal_class;
  expect_token(is, "taps");
  is >> ntaps;
  m.taps.resize(ntaps);
  for (auto& t : m.taps) is >> t;
  if (!is) throw ConfigError("malformed model header in " + path.string());
  m.layers = read_layers(is);
  m.validate();
  return m;
}

void save_adapter(const std::filesystem::path& path, const AdapterSpec& adapter) {
  adapter.validate();
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write checkpoint " + path.string());
  os << "ecc-checkpoint " << kCheckpointVersion << '\n';
  os << "adapter " << adapter.edge_tap << ' ' << adapter.cloud_tap << '\n';
  write_layers(os, adapter.layers);
}

AdapterSpec load_adapter(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read checkpoint " + path.string());
  expect_token(is, "ecc-checkpoint");
  int version = 0;
  is >> version;
  if (version != kCheckpointVersion) throw ConfigError("unsupported checkpoint version in " + path.string());
  expect_token(is, "adapter");
  AdapterSpec a;
  is >> a.edge_tap >> a.cloud_tap;
  if (!is) throw ConfigError("malformed adapter header in " + path.string());
  a.layers = read_layers(is);
  a.validate();
  return a;
}

}  // namespace ecc
