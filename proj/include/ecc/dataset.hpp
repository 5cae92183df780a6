#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ecc/data.hpp"

namespace ecc {

struct DatasetConfig {
  std::size_t num_classes = 7;
  std::size_t dim = 16;
  std::size_t samples = 10000;
  double normal_fraction = 0.4;
  std::size_t normal_class = 0;
  // 0 gives well separated clusters; larger values widen every cluster.
  double difficulty = 1.0;

  void validate() const;
};

// Generating component of the Gaussian mixture.
struct MixtureComponent {
  std::vector<double> mean;
  double stddev = 0.0;
  std::size_t label = 0;
};

struct Dataset {
  Split train;
  Split validation;
  std::size_t num_classes = 0;
  std::size_t normal_class = 0;
  double normal_fraction = 0.0;
  std::vector<MixtureComponent> components;

  std::size_t dim() const { return train.features.cols(); }
};

// Gaussian mixture: the normal class is a set of wide clusters, every
// positive class a few narrower ones. Exactly round(n * normal_fraction) normal
// samples; 80/20 split stratified per class. Deterministic in `seed`.
Dataset gen_dataset(const DatasetConfig& config, std::uint64_t seed);

// CSV with a metadata comment line, header "split,label,x0,...", and values
// printed with 17 significant digits so they read back exactly. Mixture
// components are not stored.
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace ecc
