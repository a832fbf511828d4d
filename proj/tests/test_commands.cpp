#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <nlohmann/json.hpp>

#include "glyco/commands.hpp"
#include "glyco/io.hpp"

using namespace glyco;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "glyco_command_tests" / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config(const fs::path& dir) {
  ExperimentConfig c = parse_config("model.J1 = 5\nmodel.J2 = 5\n");
  c.output_dir = dir;
  c.model.horizon = 2.0;
  c.estimate.m = 3;
  c.estimate.options.loss.grid_intervals = 100;
  c.estimate.options.nelder_mead.max_iters = 100;
  c.estimate.options.nelder_mead.max_restarts = 1;
  c.validate_horizon = 200.0;
  c.compare_replicates = 2;
  return c;
}

// Every regular file under dir, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

}  // namespace

TEST(Commands, SimulateWritesReplicatesWithDistinctSeeds) {
  const fs::path dir = scratch("simulate");
  ExperimentConfig c = small_config(dir);
  c.replicates = 2;
  std::ostringstream out;
  const SimulateResult r = cmd_simulate(c, out);
  ASSERT_EQ(r.seeds.size(), 2u);
  EXPECT_NE(r.seeds[0], r.seeds[1]);
  EXPECT_NE(read_file(dir / "trajectory_0.csv"), read_file(dir / "trajectory_1.csv"));

  // Conservation totals are constant in the written file.
  const TrajectoryTable table = parse_trajectory_csv(read_file(dir / "trajectory_0.csv"));
  ASSERT_FALSE(table.states.empty());
  const ConservationTotals first = conservation_totals(table.states.front());
  for (const auto& x : table.states) EXPECT_EQ(conservation_totals(x), first);

  const auto side = nlohmann::json::parse(read_file(dir / "trajectory_1.json"));
  EXPECT_EQ(side["seed"].get<std::uint64_t>(), r.seeds[1]);
  EXPECT_NE(out.str().find("replicate,seed,jumps,records,file"), std::string::npos);
}

TEST(Commands, EveryCommandIsByteReproducibleAcrossJobCounts) {
  for (const char* name : {"simulate", "compare", "validate-averaging", "estimate", "identify", "map-params"}) {
    std::map<std::string, std::string> reference;
    for (std::size_t jobs : {1u, 8u, 1u}) {
      const fs::path dir = scratch(std::string("det_") + name + "_" + std::to_string(jobs));
      ExperimentConfig c = small_config(dir);
      c.jobs = jobs;
      c.replicates = 3;
      std::ostringstream out, err;
      ASSERT_EQ(run_command(name, c, out, err), kExitOk) << name << ": " << err.str();
      const auto files = snapshot(dir);
      ASSERT_FALSE(files.empty()) << name;
      if (reference.empty()) reference = files;
      EXPECT_EQ(files, reference) << name << " with jobs = " << jobs;
    }
  }
}

TEST(Commands, MapParamsReferenceRow) {
  const fs::path dir = scratch("map");
  std::ostringstream out;
  const EffectiveParams theta = cmd_map_params(small_config(dir), out);
  const std::array<double, 8> expected{0.5, 3.0, 2.0, 1.0, 2.0, 0.3, 2.0, 1.5};
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NEAR(theta[i], expected[i], 5e-3);
  const auto j = nlohmann::json::parse(read_file(dir / "theta.json"));
  EXPECT_EQ(j["K1"].get<double>(), theta.k1());
}

TEST(Commands, ExitCodes) {
  const fs::path dir = scratch("exit");
  std::ostringstream out, err;
  ExperimentConfig c = parse_config("");
  c.output_dir = dir;
  EXPECT_EQ(run_command("map-params", c, out, err), kExitConfig);
  EXPECT_NE(err.str().find("J1"), std::string::npos);
  EXPECT_EQ(run_command("frobnicate", c, out, err), kExitConfig);

  ExperimentConfig bad = small_config(dir);
  bad.model.kappa[idx(Rate::k1)] = 0.0;  // theta needs k1 > 0
  EXPECT_EQ(run_command("map-params", bad, out, err), kExitConfig);

  ExperimentConfig stiff = small_config(dir);
  stiff.model.horizon = 1e9;  // exhausts the integrator's step budget
  EXPECT_EQ(run_command("identify", stiff, out, err), kExitNumerical);

  ExperimentConfig missing = small_config(dir);
  missing.estimate.data = DataSource::kFile;
  missing.estimate.data_file = (dir / "does_not_exist.csv").string();
  EXPECT_EQ(run_command("estimate", missing, out, err), kExitFailure);
}

TEST(Commands, EstimateFromSimulatedFile) {
  const fs::path dir = scratch("from_file");
  ExperimentConfig c = small_config(dir);
  c.recording.mode = RecordingMode::kGrid;
  c.recording.dt = 0.02;
  std::ostringstream out;
  cmd_simulate(c, out);
  c.estimate.data = DataSource::kFile;
  c.estimate.data_file = (dir / "trajectory_0.csv").string();
  const EstimateResult r = cmd_estimate(c, out);
  EXPECT_EQ(r.estimation.starts.size(), 3u);
  EXPECT_TRUE(r.row.relative_error);
  EXPECT_TRUE(fs::exists(dir / "estimate.csv"));
  c.model.horizon = 1.0;  // shorter than the file
  EXPECT_THROW(cmd_estimate(c, out), ConfigError);
}

TEST(Commands, JsonSummaryFormat) {
  const fs::path dir = scratch("json");
  ExperimentConfig c = small_config(dir);
  c.format = "json";
  std::ostringstream out;
  cmd_identify(c, out);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_TRUE(j.contains("condition"));
}

#ifdef GLYCO_CLI_PATH
TEST(Cli, ExitCodesAndOverrides) {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  write_file(dir / "good.cfg", "model.J1 = 5\nmodel.J2 = 5\n");
  write_file(dir / "nojs.cfg", "model.n = 100\n");
  write_file(dir / "typo.cfg", "model.kk = 1\n");
  const std::string cli = GLYCO_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(run("map-params --config " + (dir / "good.cfg").string() + " --out " + (dir / "a").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "a" / "theta.csv"));
  EXPECT_EQ(run("map-params --config " + (dir / "nojs.cfg").string() + " --out " + (dir / "b").string()), 2);
  EXPECT_NE(read_file(dir / "log.txt").find("J1"), std::string::npos);
  EXPECT_EQ(run("map-params --config " + (dir / "typo.cfg").string()), 2);
  EXPECT_EQ(run("map-params --config " + (dir / "good.cfg").string() + " --jobs 0"), 2);
  EXPECT_EQ(run("map-params --config " + (dir / "good.cfg").string() + " --format xml"), 2);
  EXPECT_EQ(run("no-such-command"), 2);
}
#endif
