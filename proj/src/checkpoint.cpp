#include "ecc/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "ecc/errors.hpp"

namespace ecc {

void expect_token(std::istream& is, const std::string& keyword) {
  std::string tok;
  if (!(is >> tok) || tok != keyword) {
    throw ConfigError("checkpoint: expected '" + keyword + "', found '" + tok + "'");
  }
}

namespace {

std::size_t read_count(std::istream& is, const char* what) {
  long long v = -1;
  if (!(is >> v) || v < 0) throw ConfigError(std::string("checkpoint: bad ") + what);
  return static_cast<std::size_t>(v);
}

}  // namespace

void write_tensor(std::ostream& os, const Tensor& t) {
  os << "tensor " << t.rank();
  for (auto d : t.shape()) os << ' ' << d;
  os << '\n';
  char buf[64];
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%a", t[i]);
    if (i) os << ' ';
    os << buf;
  }
  os << '\n';
}

Tensor read_tensor(std::istream& is) {
  expect_token(is, "tensor");
  const std::size_t rank = read_count(is, "tensor rank");
  std::vector<std::size_t> shape(rank);
  for (auto& d : shape) d = read_count(is, "tensor dimension");
  const std::size_t n = shape_size(shape);
  std::vector<double> data(n);
  std::string tok;
  for (auto& v : data) {
    if (!(is >> tok)) throw ConfigError("checkpoint: truncated tensor data");
    char* end = nullptr;
    v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw ConfigError("checkpoint: malformed number '" + tok + "'");
  }
  return Tensor(std::move(shape), std::move(data));
}

void write_layers(std::ostream& os, std::span<const LayerSpec> layers) {
  os << "layers " << layers.size() << '\n';
  for (const auto& l : layers) {
    os << "layer " << to_string(l.kind) << ' ' << l.in_dim << ' ' << l.out_dim << ' ' << to_string(l.activation)
       << ' ' << l.params.size() << '\n';
    for (const auto& p : l.params) write_tensor(os, p);
  }
}

Layers read_layers(std::istream& is) {
  expect_token(is, "layers");
  const std::size_t count = read_count(is, "layer count");
  Layers layers;
  for (std::size_t i = 0; i < count; ++i) {
    expect_token(is, "layer");
    std::string kind, act;
    LayerSpec l;
    is >> kind;
    l.kind = parse_layer_kind(kind);
    l.in_dim = read_count(is, "in_dim");
    l.out_dim = read_count(is, "out_dim");
    is >> act;
    l.activation = parse_activation(act);
    const std::size_t np = read_count(is, "parameter count");
    for (std::size_t k = 0; k < np; ++k) l.params.push_back(read_tensor(is));
    layers.push_back(std::move(l));
  }
  validate_chain(layers);
  return layers;
}

void save_layers(const std::filesystem::path& path, std::span<const LayerSpec> layers) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write checkpoint " + path.string());
  os << "ecc-checkpoint " << kCheckpointVersion << '\n';
  write_layers(os, layers);
}

Layers load_layers(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read checkpoint " + path.string());
  expect_token(is, "ecc-checkpoint");
  if (read_count(is, "version") != kCheckpointVersion) throw ConfigError("unsupported checkpoint version");
  return read_layers(is);
}

}  // namespace ecc
