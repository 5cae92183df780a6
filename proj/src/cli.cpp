#include "ecc/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ecc/errors.hpp"
#include "ecc/experiment.hpp"

namespace ecc::cli {
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string plan_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::optional<double> c1;
  std::optional<double> c2;
  std::vector<double> c2_grid;
  std::string input;
  std::string output;
  std::string axis = "comp";
};

ExperimentPlan resolve_plan(const Options& o) {
  ExperimentPlan plan = o.plan_path.empty() ? standard_plan() : load_plan(o.plan_path);
  if (o.seed) plan.seed = *o.seed;
  if (!o.out_dir.empty()) {
    plan.output_dir = o.out_dir;
  } else if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') {
    plan.output_dir = env;
  } else if (plan.output_dir.empty()) {
    plan.output_dir = kDefaultOutputDir;
  }
  if (o.c1) {
    plan.sweep.c1 = *o.c1;
    for (auto& p : plan.policies) p.c1 = *o.c1;
  }
  if (o.c2) {
    for (auto& p : plan.policies) {
      if (p.variant == PolicyVariant::kDynamic) p.c2 = *o.c2;
    }
  }
  if (!o.c2_grid.empty()) plan.sweep.c2 = o.c2_grid;
  plan.validate();
  return plan;
}

void require_file(const fs::path& path, const char* hint) {
  if (!fs::exists(path)) throw ConfigError(path.string() + " not found (" + hint + ")");
}

Dataset dataset_for(const ExperimentPlan& plan) {
  const fs::path path = plan.output_dir / "dataset.csv";
  if (fs::exists(path)) return load_dataset(path);
  Dataset data = gen_dataset(plan.dataset, derive_seed(plan.seed, "dataset"));
  fs::create_directories(plan.output_dir);
  save_dataset(path, data);
  return data;
}

std::vector<CostReport> read_reports(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path.string());
  return read_reports_csv(is);
}

FrontierAxis parse_axis(const std::string& text) {
  if (text == "comp") return FrontierAxis::kComputation;
  if (text == "comm") return FrontierAxis::kCommunication;
  throw ConfigError("--axis: expected comp or comm, got '" + text + "'");
}

int cmd_gen_data(const Options& o, std::ostream& out) {
  const auto plan = resolve_plan(o);
  const Dataset data = gen_dataset(plan.dataset, derive_seed(plan.seed, "dataset"));
  fs::create_directories(plan.output_dir);
  save_dataset(plan.output_dir / "dataset.csv", data);
  out << "wrote " << (plan.output_dir / "dataset.csv").string() << " (" << data.train.size() << " train, "
      << data.validation.size() << " val)\n";
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto plan = resolve_plan(o);
  const Dataset data = dataset_for(plan);
  const TrainedSystem system = train_system(plan, data);
  save_system(plan.output_dir, system);
  write_training_logs(plan.output_dir, system);
  out << "wrote checkpoints and training logs to " << plan.output_dir.string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const auto plan = resolve_plan(o);
  require_file(plan.output_dir / "dataset.csv", "run gen-data or train first");
  require_file(plan.output_dir / "edge.ckpt", "run train first");
  const Dataset data = load_dataset(plan.output_dir / "dataset.csv");
  const EccModels models = load_models(plan.output_dir);
  const auto reports = evaluate_policies(models, plan, data.validation);
  write_csv_file(plan.output_dir / "reports.csv", reports);
  out << "wrote " << (plan.output_dir / "reports.csv").string() << " (" << reports.size() << " rows)\n";
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto plan = resolve_plan(o);
  require_file(plan.output_dir / "dataset.csv", "run gen-data or train first");
  require_file(plan.output_dir / "edge.ckpt", "run train first");
  const Dataset data = load_dataset(plan.output_dir / "dataset.csv");
  const EccModels models = load_models(plan.output_dir);
  const auto sweep = sweep_dynamic(models, plan.sweep.c1, plan.sweep.c2, data.validation, plan.confidence_mode,
                                   plan.bytes_per_element);
  const auto reports = evaluate_policies(models, plan, data.validation);
  std::vector<CostReport> rows;
  for (const auto& pt : sweep.points) rows.push_back(pt.report);
  write_csv_file(plan.output_dir / "sweep.csv", rows);
  write_csv_file(plan.output_dir / "frontier_comp.csv", combined_frontier(reports, sweep, FrontierAxis::kComputation));
  write_csv_file(plan.output_dir / "frontier_comm.csv", combined_frontier(reports, sweep, FrontierAxis::kCommunication));
  out << "wrote sweep.csv, frontier_comp.csv and frontier_comm.csv to " << plan.output_dir.string() << '\n';
  return kExitOk;
}

int cmd_frontier(const Options& o, std::ostream& out) {
  const auto axis = parse_axis(o.axis);
  fs::path input = o.input;
  if (input.empty()) input = resolve_plan(o).output_dir / "reports.csv";
  require_file(input, "run evaluate first or pass --input");
  const auto frontier = frontier_reports(read_reports(input), axis);
  if (o.output.empty()) {
    write_reports_csv(out, frontier);
  } else {
    write_csv_file(o.output, frontier);
  }
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  fs::path input = o.input;
  if (input.empty()) input = resolve_plan(o).output_dir / "reports.csv";
  require_file(input, "run evaluate first or pass --input");
  const auto reports = read_reports(input);
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %9s %7s %11s %7s %7s %7s\n", "system", "accuracy", "S_p", "FLOPS", "S_comp",
                "S_comm", "recall");
  out << line;
  for (const auto& r : reports) {
    char sp[16] = "NA";
    if (r.s_p) std::snprintf(sp, sizeof sp, "%.4f", *r.s_p);
    std::snprintf(line, sizeof line, "%-28s %9.2f %7s %11.1f %7.4f %7.4f %7.4f\n", r.label.c_str(), 100.0 * r.accuracy,
                  sp, r.flops_ecc, r.s_comp, r.s_comm, r.recall);
    out << line;
  }
  return kExitOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Edge-cloud collaborative inference simulator", "ecc"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--plan", o.plan_path, "Plan file (JSON); default is the standard plan");
    sub->add_option("--seed", o.seed, "Master seed override");
    sub->add_option("--out", o.out_dir, std::string("Output directory (default $") + kOutputDirEnv + " or " +
                                            kDefaultOutputDir + ")");
    sub->add_option("--c1", o.c1, "Override c1 for every policy and the sweep");
    sub->add_option("--c2", o.c2, "Override c2 for dynamic policies");
    sub->add_option("--c2-grid", o.c2_grid, "Override the sweep c2 grid")->delimiter(',');
  };

  std::vector<std::pair<CLI::App*, int (*)(const Options&, std::ostream&)>> commands;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&, std::ostream&)) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub);
    commands.emplace_back(sub, fn);
    return sub;
  };
  add("gen-data", "Generate the synthetic dataset", cmd_gen_data);
  add("train", "Train cloud, edge and adapter", cmd_train);
  add("evaluate", "Evaluate the policy grid into reports.csv", cmd_evaluate);
  add("sweep", "Sweep c2 for the dynamic policy and write frontiers", cmd_sweep);
  auto* frontier = add("frontier", "Filter a reports CSV to its non-dominated rows", cmd_frontier);
  frontier->add_option("--input", o.input, "Reports CSV (default <out>/reports.csv)");
  frontier->add_option("--output", o.output, "Write here instead of stdout");
  frontier->add_option("--axis", o.axis, "comp or comm");
  auto* report = add("report", "Print a summary table of reports.csv", cmd_report);
  report->add_option("--input", o.input, "Reports CSV (default <out>/reports.csv)");

  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    err << "error: unknown subcommand '" << argv[1] << "'\n" << app.help();
    return kExitConfig;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitConfig;
  }

  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) return fn(o, out);
    }
    err << app.help();
    return kExitConfig;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace ecc::cli
