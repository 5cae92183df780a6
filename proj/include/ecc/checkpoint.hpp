#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "ecc/layers.hpp"

namespace ecc {

// Text checkpoint format, version 1. Values are written as C99 hex floats so
// reading a file back reproduces every parameter bit for bit.
//
//   ecc-checkpoint 1
//   layers <count>
//   layer <dense|residual> <in> <out> <relu|identity> <param count>
//   tensor <rank> <dim>...
//   <hex float> <hex float> ...
inline constexpr int kCheckpointVersion = 1;

void write_tensor(std::ostream& os, const Tensor& t);
Tensor read_tensor(std::istream& is);

void write_layers(std::ostream& os, std::span<const LayerSpec> layers);
Layers read_layers(std::istream& is);

void save_layers(const std::filesystem::path& path, std::span<const LayerSpec> layers);
Layers load_layers(const std::filesystem::path& path);

// Reads the next whitespace-delimited token and checks it equals `keyword`.
void expect_token(std::istream& is, const std::string& keyword);

}  // namespace ecc
