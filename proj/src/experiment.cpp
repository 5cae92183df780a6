#include "ecc/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <random>

#include "ecc/errors.hpp"

namespace ecc {

std::string_view to_string(RecallBoostMode mode) {
  switch (mode) {
    case RecallBoostMode::kOff: return "off";
    case RecallBoostMode::kSeparate: return "separate";
    case RecallBoostMode::kCombined: return "combined";
  }
  return "off";
}

RecallBoostMode parse_recall_boost_mode(std::string_view text) {
  if (text == "off") return RecallBoostMode::kOff;
  if (text == "separate") return RecallBoostMode::kSeparate;
  if (text == "combined") return RecallBoostMode::kCombined;
  throw ConfigError("unknown recall_boost mode '" + std::string(text) + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : stream) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // splitmix64 finaliser
  std::uint64_t z = master ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::string format_threshold(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string default_label(const EccPolicy& p) {
  switch (p.variant) {
    case PolicyVariant::kIndependent: return "ECC_I(c1=" + format_threshold(p.c1) + ")";
    case PolicyVariant::kAdaptive: return "ECC_A(c1=" + format_threshold(p.c1) + ")";
    case PolicyVariant::kDynamic:
      return "ECC_D(c1=" + format_threshold(p.c1) + ",c2=" + format_threshold(p.c2) + ")";
  }
  return "ECC";
}

void validate_c2_grid(double c1, std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= c1)) {
      throw ConfigError("sweep: c2 = " + format_threshold(grid[i]) + " outside [0, c1 = " + format_threshold(c1) + "]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("sweep: c2 grid must be strictly ascending");
  }
}

}  // namespace

void ExperimentPlan::validate() const {
  dataset.validate();
  edge.validate();
  cloud.validate();
  if (edge.input_dim() != dataset.dim || cloud.input_dim() != dataset.dim) {
    throw ConfigError("plan: model input widths must equal dataset.dim");
  }
  if (edge.num_classes != dataset.num_classes || cloud.num_classes != dataset.num_classes) {
    throw ConfigError("plan: model class counts must equal dataset.num_classes");
  }
  if (edge.normal_class != dataset.normal_class || cloud.normal_class != dataset.normal_class) {
    throw ConfigError("plan: models must share the dataset normal_class");
  }
  if (!edge.has_tap(adapter.edge_tap)) throw ConfigError("plan.adapter.edge_tap: not a declared edge tap");
  if (!cloud.has_tap(adapter.cloud_tap)) throw ConfigError("plan.adapter.cloud_tap: not a declared cloud tap");
  if (adapter.blocks > kMaxAdapterBlocks) throw ConfigError("plan.adapter.blocks: at most 4");
  for (const auto* c : {&training.cloud, &training.edge, &training.recall, &training.finetune}) c->validate();
  for (const auto& p : policies) p.validate();
  if (bytes_per_element == 0) throw ConfigError("plan.bytes_per_element: must be positive");
  if (!(sweep.c1 >= 0.0 && sweep.c1 <= 1.0)) throw ConfigError("plan.sweep.c1: must lie in [0, 1]");
  validate_c2_grid(sweep.c1, sweep.c2);
}

ExperimentPlan standard_plan(std::uint64_t seed) {
  ExperimentPlan p;
  p.seed = seed;
  p.dataset = DatasetConfig{};
  const std::vector<std::size_t> edge_hidden{8};
  const std::vector<std::size_t> cloud_hidden{64, 64, 64, 64};
  p.edge = make_mlp("edge", p.dataset.dim, edge_hidden, p.dataset.num_classes, p.dataset.normal_class);
  p.cloud = make_mlp("cloud", p.dataset.dim, cloud_hidden, p.dataset.num_classes, p.dataset.normal_class);
  p.adapter = AdapterConfig{};

  p.training.cloud = TrainConfig{20, 32, 0.05, 1.0, 0, TrainStage::kBase};
  p.training.edge = TrainConfig{20, 32, 0.05, 1.0, 0, TrainStage::kKdEdge};
  p.training.recall = TrainConfig{10, 32, 0.05, 1.0, 0, TrainStage::kRecallBoost};
  p.training.finetune = TrainConfig{10, 32, 0.05, 1.0, 0, TrainStage::kAdapterFinetune};
  p.training.recall_boost = RecallBoostMode::kSeparate;

  const double c1 = 0.8;
  p.policies = {EccPolicy::independent(c1), EccPolicy::adaptive(c1), EccPolicy::dynamic(c1, 0.3)};
  p.policies[0].label = "ECC_I";
  p.policies[1].label = "ECC_A";
  p.policies[2].label = "ECC_D";
  p.sweep.c1 = c1;
  p.sweep.c2 = {0.0, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, c1};
  return p;
}

namespace {

TrainConfig train_config_from_json(const config::Json& j, const std::string& path, TrainConfig base) {
  using namespace config;
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  base.epochs = get_or<int>(j, "epochs", path, base.epochs);
  base.batch_size = get_or<std::size_t>(j, "batch_size", path, base.batch_size);
  base.learning_rate = get_or<double>(j, "learning_rate", path, base.learning_rate);
  base.kd_weight = get_or<double>(j, "kd_weight", path, base.kd_weight);
  try {
    base.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return base;
}

config::Json train_config_to_json(const TrainConfig& c) {
  return {{"epochs", c.epochs}, {"batch_size", c.batch_size}, {"learning_rate", c.learning_rate}, {"kd_weight", c.kd_weight}};
}

ModelSpec model_from_plan(const config::Json& j, const std::string& path, const std::string& default_name,
                          const DatasetConfig& ds) {
  using namespace config;
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  if (j.contains("hidden")) {
    std::vector<std::size_t> hidden;
    const auto& h = j["hidden"];
    if (!h.is_array()) throw ConfigError(join(path, "hidden") + ": expected an array");
    for (std::size_t i = 0; i < h.size(); ++i) {
      hidden.push_back(as<std::size_t>(h[i], join(path, "hidden") + "[" + std::to_string(i) + "]"));
      if (hidden.back() == 0) throw ConfigError(join(path, "hidden") + ": widths must be positive");
    }
    return make_mlp(get_or<std::string>(j, "name", path, default_name), ds.dim, hidden, ds.num_classes,
                    ds.normal_class);
  }
  Json def = j;
  if (!def.contains("name")) def["name"] = default_name;
  if (!def.contains("input_dim")) def["input_dim"] = ds.dim;
  if (!def.contains("num_classes")) def["num_classes"] = ds.num_classes;
  if (!def.contains("normal_class")) def["normal_class"] = ds.normal_class;
  return model_from_json(def, path);
}

}  // namespace

ExperimentPlan plan_from_json(const config::Json& json) {
  using namespace config;
  const std::string root = "plan";
  if (!json.is_object()) throw ConfigError("plan: expected a JSON object");
  ExperimentPlan p = standard_plan(get_or<std::uint64_t>(json, "seed", root, 0));
  p.output_dir = get_or<std::string>(json, "output_dir", root, "");

  if (json.contains("dataset")) {
    const auto& d = json["dataset"];
    const std::string dp = join(root, "dataset");
    if (!d.is_object()) throw ConfigError(dp + ": expected an object");
    p.dataset.num_classes = get_or<std::size_t>(d, "num_classes", dp, p.dataset.num_classes);
    p.dataset.dim = get_or<std::size_t>(d, "dim", dp, p.dataset.dim);
    p.dataset.samples = get_or<std::size_t>(d, "samples", dp, p.dataset.samples);
    p.dataset.normal_fraction = get_or<double>(d, "normal_fraction", dp, p.dataset.normal_fraction);
    p.dataset.normal_class = get_or<std::size_t>(d, "normal_class", dp, p.dataset.normal_class);
    p.dataset.difficulty = get_or<double>(d, "difficulty", dp, p.dataset.difficulty);
    try {
      p.dataset.validate();
    } catch (const UsageError& e) {
      throw ConfigError(dp + ": " + e.what());
    }
  }
  // Model defaults follow the dataset shape.
  const std::vector<std::size_t> edge_hidden{8};
  const std::vector<std::size_t> cloud_hidden{64, 64, 64, 64};
  p.edge = json.contains("edge") ? model_from_plan(json["edge"], join(root, "edge"), "edge", p.dataset)
                                 : make_mlp("edge", p.dataset.dim, edge_hidden, p.dataset.num_classes, p.dataset.normal_class);
  p.cloud = json.contains("cloud") ? model_from_plan(json["cloud"], join(root, "cloud"), "cloud", p.dataset)
                                   : make_mlp("cloud", p.dataset.dim, cloud_hidden, p.dataset.num_classes, p.dataset.normal_class);

  if (json.contains("adapter")) {
    const auto& a = json["adapter"];
    const std::string ap = join(root, "adapter");
    p.adapter.edge_tap = get_or<std::size_t>(a, "edge_tap", ap, p.adapter.edge_tap);
    p.adapter.cloud_tap = get_or<std::size_t>(a, "cloud_tap", ap, p.adapter.cloud_tap);
    p.adapter.blocks = get_or<std::size_t>(a, "blocks", ap, p.adapter.blocks);
    try {
      p.adapter.block_activation = parse_activation(get_or<std::string>(a, "block_activation", ap, "relu"));
    } catch (const ConfigError& e) {
      throw ConfigError(join(ap, "block_activation") + ": " + e.what());
    }
  }

  if (json.contains("training")) {
    const auto& t = json["training"];
    const std::string tp = join(root, "training");
    if (!t.is_object()) throw ConfigError(tp + ": expected an object");
    if (t.contains("cloud")) p.training.cloud = train_config_from_json(t["cloud"], join(tp, "cloud"), p.training.cloud);
    if (t.contains("edge")) p.training.edge = train_config_from_json(t["edge"], join(tp, "edge"), p.training.edge);
    if (t.contains("recall")) p.training.recall = train_config_from_json(t["recall"], join(tp, "recall"), p.training.recall);
    if (t.contains("finetune")) {
      p.training.finetune = train_config_from_json(t["finetune"], join(tp, "finetune"), p.training.finetune);
    }
    try {
      p.training.recall_boost = parse_recall_boost_mode(get_or<std::string>(t, "recall_boost", tp, std::string(to_string(p.training.recall_boost))));
    } catch (const ConfigError& e) {
      throw ConfigError(join(tp, "recall_boost") + ": " + e.what());
    }
  }

  p.bytes_per_element = get_or<std::size_t>(json, "bytes_per_element", root, p.bytes_per_element);
  try {
    p.confidence_mode = parse_confidence_mode(get_or<std::string>(json, "confidence_mode", root, std::string(to_string(p.confidence_mode))));
  } catch (const ConfigError& e) {
    throw ConfigError(join(root, "confidence_mode") + ": " + e.what());
  }

  if (json.contains("policies")) {
    const auto& pol = json["policies"];
    const std::string pp = join(root, "policies");
    if (!pol.is_array()) throw ConfigError(pp + ": expected an array");
    p.policies.clear();
    for (std::size_t i = 0; i < pol.size(); ++i) {
      const std::string ip = pp + "[" + std::to_string(i) + "]";
      EccPolicy e;
      try {
        e.variant = parse_policy_variant(get<std::string>(pol[i], "variant", ip));
      } catch (const ConfigError& err) {
        const std::string msg = err.what();
        throw ConfigError(msg.rfind(ip, 0) == 0 ? msg : join(ip, "variant") + ": " + msg);
      }
      e.c1 = get<double>(pol[i], "c1", ip);
      e.c2 = get_or<double>(pol[i], "c2", ip, 0.0);
      e.label = get_or<std::string>(pol[i], "label", ip, "");
      if (pol[i].contains("confidence_mode")) {
        try {
          e.confidence_mode = parse_confidence_mode(get<std::string>(pol[i], "confidence_mode", ip));
        } catch (const ConfigError& err) {
          throw ConfigError(join(ip, "confidence_mode") + ": " + err.what());
        }
      } else {
        e.confidence_mode = p.confidence_mode;
      }
      try {
        e.validate();
      } catch (const ConfigError& err) {
        throw ConfigError(ip + ": " + err.what());
      }
      p.policies.push_back(std::move(e));
    }
  } else {
    for (auto& e : p.policies) e.confidence_mode = p.confidence_mode;
  }

  if (json.contains("sweep")) {
    const auto& s = json["sweep"];
    const std::string sp = join(root, "sweep");
    p.sweep.c1 = get_or<double>(s, "c1", sp, p.sweep.c1);
    if (s.contains("c2")) {
      if (!s["c2"].is_array()) throw ConfigError(join(sp, "c2") + ": expected an array");
      p.sweep.c2.clear();
      for (std::size_t i = 0; i < s["c2"].size(); ++i) {
        p.sweep.c2.push_back(as<double>(s["c2"][i], join(sp, "c2") + "[" + std::to_string(i) + "]"));
      }
    }
  }
  for (auto& e : p.policies) e.bytes_per_element = p.bytes_per_element;
  p.validate();
  return p;
}

config::Json plan_to_json(const ExperimentPlan& p) {
  using config::Json;
  Json policies = Json::array();
  for (const auto& e : p.policies) {
    Json j{{"variant", to_string(e.variant)}, {"c1", e.c1}, {"confidence_mode", to_string(e.confidence_mode)}};
    if (e.variant == PolicyVariant::kDynamic) j["c2"] = e.c2;
    if (!e.label.empty()) j["label"] = e.label;
    policies.push_back(j);
  }
  return Json{
      {"seed", p.seed},
      {"output_dir", p.output_dir.string()},
      {"dataset",
       {{"num_classes", p.dataset.num_classes},
        {"dim", p.dataset.dim},
        {"samples", p.dataset.samples},
        {"normal_fraction", p.dataset.normal_fraction},
        {"normal_class", p.dataset.normal_class},
        {"difficulty", p.dataset.difficulty}}},
      {"edge", model_to_json(p.edge)},
      {"cloud", model_to_json(p.cloud)},
      {"adapter",
       {{"edge_tap", p.adapter.edge_tap},
        {"cloud_tap", p.adapter.cloud_tap},
        {"blocks", p.adapter.blocks},
        {"block_activation", to_string(p.adapter.block_activation)}}},
      {"training",
       {{"cloud", train_config_to_json(p.training.cloud)},
        {"edge", train_config_to_json(p.training.edge)},
        {"recall", train_config_to_json(p.training.recall)},
        {"finetune", train_config_to_json(p.training.finetune)},
        {"recall_boost", to_string(p.training.recall_boost)}}},
      {"bytes_per_element", p.bytes_per_element},
      {"confidence_mode", to_string(p.confidence_mode)},
      {"policies", policies},
      {"sweep", {{"c1", p.sweep.c1}, {"c2", p.sweep.c2}}}};
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read plan " + path.string());
  config::Json j;
  try {
    j = config::Json::parse(is);
  } catch (const config::Json::parse_error& e) {
    throw ConfigError("plan: " + std::string(e.what()));
  }
  return plan_from_json(j);
}

namespace {

template <class F>
auto run_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const DivergenceError& e) {
    throw DivergenceError(stage, e.epoch());
  }
}

TrainConfig seeded(TrainConfig c, std::uint64_t master, const char* stream, TrainStage stage) {
  c.seed = derive_seed(master, stream);
  c.stage = stage;
  return c;
}

}  // namespace

TrainedSystem train_system(const ExperimentPlan& plan, const Dataset& data) {
  plan.validate();
  TrainedSystem sys;

  ModelSpec cloud = plan.cloud;
  {
    std::mt19937_64 rng(derive_seed(plan.seed, "init/cloud"));
    init_model(cloud, rng);
  }
  auto cloud_cfg = seeded(plan.training.cloud, plan.seed, "shuffle/cloud", TrainStage::kBase);
  auto cloud_run = run_stage("cloud-base", [&] { return train_base(std::move(cloud), data.train, cloud_cfg); });
  sys.logs["cloud"] = std::move(cloud_run.history);
  cloud = std::move(cloud_run.model);

  ModelSpec edge = plan.edge;
  AdapterSpec adapter = AdapterSpec::make(plan.adapter.edge_tap, plan.adapter.cloud_tap, edge.tap_dim(plan.adapter.edge_tap),
                                          cloud.tap_dim(plan.adapter.cloud_tap), plan.adapter.blocks,
                                          plan.adapter.block_activation);
  {
    std::mt19937_64 rng(derive_seed(plan.seed, "init/edge"));
    init_model(edge, rng);
    init_adapter(adapter, rng);
  }
  auto edge_cfg = seeded(plan.training.edge, plan.seed, "shuffle/edge", TrainStage::kKdEdge);
  KdOptions kd_opts;
  kd_opts.recall_boost = plan.training.recall_boost == RecallBoostMode::kCombined;
  auto kd = run_stage("edge-kd", [&] { return train_edge_kd(std::move(edge), cloud, std::move(adapter), data.train, edge_cfg, kd_opts); });
  sys.logs["edge"] = std::move(kd.history);
  edge = std::move(kd.edge);
  adapter = std::move(kd.adapter);

  if (plan.training.recall_boost == RecallBoostMode::kSeparate) {
    auto rb_cfg = seeded(plan.training.recall, plan.seed, "shuffle/recall", TrainStage::kRecallBoost);
    auto rb = run_stage("recall-boost", [&] { return train_recall_boost(std::move(edge), data.train, rb_cfg); });
    sys.logs["recall"] = std::move(rb.history);
    edge = std::move(rb.edge);
  }

  auto ft_cfg = seeded(plan.training.finetune, plan.seed, "shuffle/finetune", TrainStage::kAdapterFinetune);
  auto ft = run_stage("adapter-finetune", [&] { return finetune_adapter(edge, cloud, std::move(adapter), data.train, ft_cfg); });
  sys.logs["finetune"] = std::move(ft.history);

  sys.models.edge = std::move(edge);
  sys.models.cloud = std::move(cloud);
  sys.models.adapter = std::move(ft.adapter);
  sys.models.adaptive_cloud = std::move(ft.cloud);
  sys.models.adaptive_cloud.name = "adaptive_cloud";
  sys.models.validate();
  return sys;
}

void save_system(const std::filesystem::path& dir, const TrainedSystem& system) {
  std::filesystem::create_directories(dir);
  save_model(dir / "edge.ckpt", system.models.edge);
  save_model(dir / "cloud.ckpt", system.models.cloud);
  save_model(dir / "adaptive_cloud.ckpt", system.models.adaptive_cloud);
  save_adapter(dir / "adapter.ckpt", system.models.adapter);
}

EccModels load_models(const std::filesystem::path& dir) {
  EccModels m;
  m.edge = load_model(dir / "edge.ckpt");
  m.cloud = load_model(dir / "cloud.ckpt");
  m.adaptive_cloud = load_model(dir / "adaptive_cloud.ckpt");
  m.adapter = load_adapter(dir / "adapter.ckpt");
  m.validate();
  return m;
}

Baselines measure_baselines(const EccModels& models, const Split& data, std::size_t bytes_per_element) {
  Baselines b;
  b.flops_edge = static_cast<double>(flops(models.edge.layers));
  b.flops_cloud = static_cast<double>(flops(models.cloud.layers));
  b.edge = classification_metrics(infer(models.edge, data.features), data.labels, models.edge.normal_class);
  b.cloud = classification_metrics(infer(models.cloud, data.features), data.labels, models.cloud.normal_class);
  b.input_bytes = data.features.cols() * bytes_per_element;
  return b;
}

std::vector<CostReport> evaluate_policies(const EccModels& models, const ExperimentPlan& plan, const Split& data) {
  const Baselines b = measure_baselines(models, data, plan.bytes_per_element);
  std::vector<CostReport> out{edge_baseline(b.flops_edge, b.flops_cloud, b.edge, b.cloud),
                              cloud_baseline(b.flops_edge, b.flops_cloud, b.edge, b.cloud)};
  for (auto policy : plan.policies) {
    policy.bytes_per_element = plan.bytes_per_element;
    const auto eval = evaluate_policy(models, policy, data);
    const std::string label = policy.label.empty() ? default_label(policy) : policy.label;
    out.push_back(make_cost_report(label, eval, b.input_bytes, b.flops_edge, b.flops_cloud, b.edge, b.cloud));
  }
  return out;
}

std::string sweep_label(double c2) { return "ECC_D(c2=" + format_threshold(c2) + ")"; }

SweepResult sweep_dynamic(const EccModels& models, double c1, std::span<const double> c2_grid, const Split& data,
                          ConfidenceMode mode, std::size_t bytes_per_element) {
  if (!(c1 >= 0.0 && c1 <= 1.0)) throw ConfigError("sweep: c1 must lie in [0, 1]");
  validate_c2_grid(c1, c2_grid);
  const Baselines b = measure_baselines(models, data, bytes_per_element);
  SweepResult out;
  for (double c2 : c2_grid) {
    EccPolicy policy = EccPolicy::dynamic(c1, c2);
    policy.confidence_mode = mode;
    policy.bytes_per_element = bytes_per_element;
    auto eval = evaluate_policy(models, policy, data);
    SweepPoint pt;
    pt.c2 = c2;
    pt.report = make_cost_report(sweep_label(c2), eval, b.input_bytes, b.flops_edge, b.flops_cloud, b.edge, b.cloud);
    pt.edge_only = eval.edge_only;
    pt.adaptive = eval.adaptive;
    pt.full_cloud = eval.full_cloud;
    pt.records = std::move(eval.records);
    out.points.push_back(std::move(pt));
  }
  std::vector<CostReport> reports;
  for (const auto& pt : out.points) reports.push_back(pt.report);
  out.frontier = frontier_reports(reports, FrontierAxis::kComputation);
  return out;
}

std::vector<CostReport> combined_frontier(std::span<const CostReport> reports, const SweepResult& sweep,
                                          FrontierAxis axis) {
  std::vector<CostReport> all(reports.begin(), reports.end());
  for (const auto& pt : sweep.points) all.push_back(pt.report);
  return frontier_reports(all, axis);
}

void write_csv_file(const std::filesystem::path& path, std::span<const CostReport> reports) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path.string());
  write_reports_csv(os, reports);
}

void write_training_logs(const std::filesystem::path& dir, const TrainedSystem& system) {
  std::filesystem::create_directories(dir);
  for (const auto& [stage, history] : system.logs) {
    std::ofstream os(dir / ("train_" + stage + ".csv"));
    if (!os) throw ConfigError("cannot write training log for " + stage);
    write_training_log(os, history);
  }
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  ExperimentResult r;
  r.dataset = gen_dataset(plan.dataset, derive_seed(plan.seed, "dataset"));
  r.system = train_system(plan, r.dataset);
  r.reports = evaluate_policies(r.system.models, plan, r.dataset.validation);
  r.sweep = sweep_dynamic(r.system.models, plan.sweep.c1, plan.sweep.c2, r.dataset.validation, plan.confidence_mode,
                          plan.bytes_per_element);
  r.frontier_comp = combined_frontier(r.reports, r.sweep, FrontierAxis::kComputation);
  r.frontier_comm = combined_frontier(r.reports, r.sweep, FrontierAxis::kCommunication);

  if (!plan.output_dir.empty()) {
    const auto& dir = plan.output_dir;
    std::filesystem::create_directories(dir);
    save_dataset(dir / "dataset.csv", r.dataset);
    save_system(dir, r.system);
    write_training_logs(dir, r.system);
    write_csv_file(dir / "reports.csv", r.reports);
    std::vector<CostReport> sweep_rows;
    for (const auto& pt : r.sweep.points) sweep_rows.push_back(pt.report);
    write_csv_file(dir / "sweep.csv", sweep_rows);
    write_csv_file(dir / "frontier_comp.csv", r.frontier_comp);
    write_csv_file(dir / "frontier_comm.csv", r.frontier_comm);
  }
  return r;
}

}  // namespace ecc
