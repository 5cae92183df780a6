#include "ecc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "ecc/errors.hpp"

namespace ecc {

namespace {

constexpr std::size_t kNormalComponents = 4;
constexpr std::size_t kPositiveComponents = 3;
constexpr double kCenterScale = 1.0;
constexpr double kBaseStddev = 0.05;
constexpr double kNormalWidth = 1.5;
constexpr double kTrainFraction = 0.8;

}  // namespace

void DatasetConfig::validate() const {
  if (num_classes < 2) throw UsageError("dataset: num_classes must be at least 2");
  if (dim == 0) throw UsageError("dataset: dim must be positive");
  if (samples == 0 || samples < num_classes) throw UsageError("dataset: need at least one sample per class");
  if (!(normal_fraction >= 0.0 && normal_fraction <= 1.0)) throw UsageError("dataset: normal_fraction must be in [0, 1]");
  if (normal_class >= num_classes) throw UsageError("dataset: normal_class out of range");
  if (!(difficulty >= 0.0) || !std::isfinite(difficulty)) throw UsageError("dataset: difficulty must be >= 0");
}

Dataset gen_dataset(const DatasetConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t d = config.dim;
  const double stddev = kBaseStddev + config.difficulty;

  Dataset ds;
  ds.num_classes = config.num_classes;
  ds.normal_class = config.normal_class;
  ds.normal_fraction = config.normal_fraction;

  // Components: kNormalComponents wide clusters for the normal class, then
  // kPositiveComponents clusters per positive class. Means are
  // kCenterScale * N(0, I).
  auto make_mean = [&] {
    std::vector<double> m(d);
    for (auto& v : m) v = kCenterScale * gauss(rng);
    return m;
  };
  for (std::size_t c = 0; c < kNormalComponents; ++c) {
    ds.components.push_back({make_mean(), stddev * kNormalWidth, config.normal_class});
  }
  for (std::size_t k = 0; k < config.num_classes; ++k) {
    if (k == config.normal_class) continue;
    for (std::size_t c = 0; c < kPositiveComponents; ++c) ds.components.push_back({make_mean(), stddev, k});
  }

  // Per-class sample counts.
  std::vector<std::size_t> counts(config.num_classes, 0);
  const auto n_normal = static_cast<std::size_t>(std::llround(config.normal_fraction * static_cast<double>(config.samples)));
  counts[config.normal_class] = n_normal;
  const std::size_t n_pos = config.samples - n_normal;
  const std::size_t positives = config.num_classes - 1;
  std::size_t slot = 0;
  for (std::size_t k = 0; k < config.num_classes; ++k) {
    if (k == config.normal_class) continue;
    counts[k] = n_pos / positives + (slot < n_pos % positives ? 1 : 0);
    ++slot;
  }

  std::vector<std::vector<double>> train_x, val_x;
  std::vector<std::size_t> train_y, val_y;
  for (std::size_t k = 0; k < config.num_classes; ++k) {
    std::vector<const MixtureComponent*> comps;
    for (const auto& c : ds.components) {
      if (c.label == k) comps.push_back(&c);
    }
    std::vector<std::vector<double>> rows(counts[k]);
    for (std::size_t i = 0; i < counts[k]; ++i) {
      const auto& comp = *comps[i % comps.size()];
      rows[i].resize(d);
      for (std::size_t j = 0; j < d; ++j) rows[i][j] = comp.mean[j] + comp.stddev * gauss(rng);
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(kTrainFraction * static_cast<double>(counts[k])));
    for (std::size_t i = 0; i < counts[k]; ++i) {
      auto& xs = i < n_train ? train_x : val_x;
      auto& ys = i < n_train ? train_y : val_y;
      xs.push_back(std::move(rows[i]));
      ys.push_back(k);
    }
  }

  auto pack = [&](std::vector<std::vector<double>>& xs, std::vector<std::size_t>& ys) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    Split s;
    if (xs.empty()) return s;
    std::vector<double> flat;
    flat.reserve(xs.size() * d);
    for (auto i : order) {
      flat.insert(flat.end(), xs[i].begin(), xs[i].end());
      s.labels.push_back(ys[i]);
    }
    s.features = Tensor({xs.size(), d}, std::move(flat));
    return s;
  };
  ds.train = pack(train_x, train_y);
  ds.validation = pack(val_x, val_y);
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write dataset " + path.string());
  os << "# ecc-dataset 1 num_classes=" << data.num_classes << " normal_class=" << data.normal_class
     << " normal_fraction=" << data.normal_fraction << '\n';
  os << "split,label";
  for (std::size_t j = 0; j < data.dim(); ++j) os << ",x" << j;
  os << '\n';
  char buf[64];
  auto dump = [&](const Split& s, const char* name) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      os << name << ',' << s.labels[i];
      for (double v : s.features.row(i)) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << ',' << buf;
      }
      os << '\n';
    }
  };
  dump(data.train, "train");
  dump(data.validation, "val");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read dataset " + path.string());
  std::string line;
  std::getline(is, line);
  Dataset ds;
  if (std::sscanf(line.c_str(), "# ecc-dataset 1 num_classes=%zu normal_class=%zu normal_fraction=%lf",
                  &ds.num_classes, &ds.normal_class, &ds.normal_fraction) != 3) {
    throw ConfigError(path.string() + ": missing dataset metadata line");
  }
  std::getline(is, line);
  const auto dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') - 1);
  if (line.rfind("split,label", 0) != 0 || dim == 0) throw ConfigError(path.string() + ": bad header");

  std::vector<double> tx, vx;
  std::size_t lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, ',');
    const bool train = field == "train";
    if (!train && field != "val") throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad split");
    std::getline(ss, field, ',');
    const auto label = static_cast<std::size_t>(std::strtoull(field.c_str(), nullptr, 10));
    (train ? ds.train : ds.validation).labels.push_back(label);
    auto& xs = train ? tx : vx;
    std::size_t read = 0;
    while (std::getline(ss, field, ',')) {
      char* end = nullptr;
      xs.push_back(std::strtod(field.c_str(), &end));
      if (end != field.c_str() + field.size()) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad number");
      ++read;
    }
    if (read != dim) throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": wrong column count");
  }
  if (ds.train.labels.empty() || ds.validation.labels.empty()) throw ConfigError(path.string() + ": empty split");
  ds.train.features = Tensor({ds.train.labels.size(), dim}, std::move(tx));
  ds.validation.features = Tensor({ds.validation.labels.size(), dim}, std::move(vx));
  ds.train.validate(ds.num_classes);
  ds.validation.validate(ds.num_classes);
  return ds;
}

}  // namespace ecc
