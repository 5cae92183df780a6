#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ecc/cli.hpp"
#include "ecc/experiment.hpp"
#include "test_plans.hpp"

namespace fs = std::filesystem;
using ecc::cli::dispatch;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "ecc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const char* name) {
  fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

fs::path write_small_plan(const fs::path& dir, std::uint64_t seed) {
  const fs::path plan = dir / "plan.json";
  write_file(plan, ecc::plan_to_json(test_plans::small_plan(seed)).dump(2));
  return plan;
}

}  // namespace

TEST(Cli, UnknownSubcommand) {
  CliRun r = run({"fly"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unknown subcommand"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Cli, HelpSucceeds) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, FrontierFiltersDominatedRow) {
  fs::path dir = scratch("ecc_cli_frontier");
  write_file(dir / "three.csv",
             "label,s_p,s_comp,s_comm,tau,psi,flops_ecc,accuracy,recall\n"
             "A,0.9,0.7,0.5,0.5,1,10,0.8,0.9\n"
             "B,0.8,0.8,0.5,0.5,1,10,0.8,0.9\n"
             "C,0.95,0.9,0.5,0.5,1,10,0.8,0.9\n");
  CliRun r = run({"frontier", "--input", (dir / "three.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "label,s_p,s_comp,s_comm,tau,psi,flops_ecc,accuracy,recall\n"
            "A,0.9,0.7,0.5,0.5,1,10,0.8,0.9\n"
            "C,0.95,0.9,0.5,0.5,1,10,0.8,0.9\n");
  EXPECT_EQ(run({"frontier", "--input", (dir / "three.csv").string(), "--axis", "time"}).code, 2);
  EXPECT_EQ(run({"frontier", "--input", (dir / "missing.csv").string()}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, MalformedPlanReportsFieldPath) {
  fs::path dir = scratch("ecc_cli_badplan");
  write_file(dir / "bad.json", R"({"training": {"cloud": {"epochs": "many"}}})");
  CliRun r = run({"train", "--plan", (dir / "bad.json").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("plan.training.cloud.epochs"), std::string::npos) << r.err;
  write_file(dir / "broken.json", "{not json");
  EXPECT_EQ(run({"train", "--plan", (dir / "broken.json").string()}).code, 2);
  EXPECT_EQ(run({"train", "--plan", (dir / "absent.json").string()}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, DivergenceExitsThreeWithStage) {
  fs::path dir = scratch("ecc_cli_diverge");
  ecc::ExperimentPlan p = test_plans::small_plan(1);
  p.training.cloud.learning_rate = 1e300;
  write_file(dir / "plan.json", ecc::plan_to_json(p).dump());
  CliRun r = run({"train", "--plan", (dir / "plan.json").string(), "--out", dir.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("cloud-base"), std::string::npos) << r.err;
  fs::remove_all(dir);
}

TEST(Cli, EvaluateBeforeTrainFails) {
  fs::path dir = scratch("ecc_cli_untrained");
  EXPECT_EQ(run({"evaluate", "--out", dir.string()}).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, TrainEvaluateSweepReport) {
  fs::path dir = scratch("ecc_cli_pipeline");
  const auto plan = write_small_plan(dir, 5).string();
  const auto out = (dir / "run").string();
  ASSERT_EQ(run({"gen-data", "--plan", plan, "--out", out}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "run" / "dataset.csv"));
  CliRun t = run({"train", "--plan", plan, "--out", out});
  ASSERT_EQ(t.code, 0) << t.err;
  for (const char* f : {"edge.ckpt", "cloud.ckpt", "adapter.ckpt", "adaptive_cloud.ckpt", "train_cloud.csv"}) {
    EXPECT_TRUE(fs::exists(dir / "run" / f)) << f;
  }
  ASSERT_EQ(run({"evaluate", "--plan", plan, "--out", out}).code, 0);
  std::ifstream is(dir / "run" / "reports.csv");
  auto reports = ecc::read_reports_csv(is);
  ASSERT_EQ(reports.size(), 5u);
  EXPECT_EQ(reports[0].label, "edge");
  EXPECT_EQ(reports[1].label, "cloud");
  EXPECT_EQ(reports[2].label, "ECC_I");

  ASSERT_EQ(run({"sweep", "--plan", plan, "--out", out, "--c2-grid", "0.2,0.3,0.4"}).code, 0);
  std::ifstream sw(dir / "run" / "sweep.csv");
  EXPECT_EQ(ecc::read_reports_csv(sw).size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "run" / "frontier_comm.csv"));
  EXPECT_EQ(run({"sweep", "--plan", plan, "--out", out, "--c2-grid", "0.2,0.95"}).code, 2);

  CliRun rep = run({"report", "--out", out});
  ASSERT_EQ(rep.code, 0);
  EXPECT_NE(rep.out.find("ECC_D"), std::string::npos);
  EXPECT_NE(rep.out.find("S_comp"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, OutputDirFromEnvironment) {
  fs::path dir = scratch("ecc_cli_env");
  ::setenv(ecc::cli::kOutputDirEnv, (dir / "envout").c_str(), 1);
  EXPECT_EQ(run({"gen-data", "--plan", write_small_plan(dir, 2).string()}).code, 0);
  ::unsetenv(ecc::cli::kOutputDirEnv);
  EXPECT_TRUE(fs::exists(dir / "envout" / "dataset.csv"));
  fs::remove_all(dir);
}

TEST(Cli, SeedOverrideChangesData) {
  fs::path dir = scratch("ecc_cli_seed");
  const auto plan = write_small_plan(dir, 2).string();
  ASSERT_EQ(run({"gen-data", "--plan", plan, "--out", (dir / "a").string(), "--seed", "1"}).code, 0);
  ASSERT_EQ(run({"gen-data", "--plan", plan, "--out", (dir / "b").string(), "--seed", "1"}).code, 0);
  ASSERT_EQ(run({"gen-data", "--plan", plan, "--out", (dir / "c").string(), "--seed", "2"}).code, 0);
  auto read = [](const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  EXPECT_EQ(read(dir / "a" / "dataset.csv"), read(dir / "b" / "dataset.csv"));
  EXPECT_NE(read(dir / "a" / "dataset.csv"), read(dir / "c" / "dataset.csv"));
  fs::remove_all(dir);
}
