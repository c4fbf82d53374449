#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dthsem/cli/commands.hpp"
#include "dthsem/dthsem.hpp"

using namespace dth;
using namespace dth::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dthsem_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::stringstream s(line);
    for (std::string c; std::getline(s, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Exit {
  int code = -1;
  std::string err;
};

Exit run_binary(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(DTHSEM_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() +
                          " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Config, RejectsInvalidInput) {
  EXPECT_THROW(parse_config("{"), ConfigError);
  EXPECT_THROW(parse_config(R"({"stepz": 3})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"steps": 0})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"steps": 1.5})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"initial": {"q0": 1, "p0": 0, "wp0": 0, "lambda_target": 0.1}})"),
               ConfigError);
  EXPECT_THROW(parse_config(R"({"initial": {"q0": 1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"policy": "largest"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"delta": 1.5})"), ConfigError);
  EXPECT_NO_THROW(parse_config(R"({"initial": {"q0": 1, "p0": 0.5, "lambda_target": 0.1}, "steps": 3})"));
}

TEST(CmdRun, PendulumThousandSteps) {
  const fs::path dir = scratch("run");
  Config c = parse_config(R"({"initial": {"q0": 1.0, "p0": 0.5, "lambda_target": 0.1}, "steps": 1000})");
  c.outputs.dir = dir.string();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_run(c, out, err), ok) << err.str();
  const auto rows = read_csv(dir / "trajectory.csv");
  ASSERT_EQ(rows.size(), 1002u);
  double max_h = 0.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) max_h = std::max(max_h, std::stod(rows[i].back()));
  EXPECT_LE(max_h, 1e-10);
  EXPECT_TRUE(rows.back()[1].empty());
  EXPECT_TRUE(fs::exists(dir / "trajectory.json"));
}

TEST(CmdScan, ColumnsAgreeWithConstraintModel) {
  const fs::path dir = scratch("scan");
  Config c = parse_config(
      R"({"scan": {"state": [1.0, 0, 0.5, 0.42], "lambda_min": -0.1, "lambda_max": 0.1, "count": 201}})");
  c.outputs.dir = dir.string();
  std::ostringstream out, err;
  ASSERT_EQ(cmd_scan(c, out, err), ok) << err.str();
  const std::string first = slurp(dir / "scan.csv");
  const auto rows = read_csv(dir / "scan.csv");
  ASSERT_EQ(rows.size(), 202u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"lambda", "g", "cubic", "bound", "dg_dlambda", "status"}));
  Vector z(4);
  z << 1.0, 0, 0.5, 0.42;
  const double h = pendulum()->value(z);
  bool saw_zero = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i][5], "ok");
    const double lam = std::stod(rows[i][0]);
    EXPECT_LE(std::abs(std::stod(rows[i][1]) - std::stod(rows[i][2])), std::stod(rows[i][3]) + 1e-11);
    if (lam == 0.0) {
      saw_zero = true;
      EXPECT_NEAR(std::stod(rows[i][1]), h, 1e-15);
      EXPECT_NEAR(std::stod(rows[i][4]), 0.0, 1e-12);
    }
  }
  EXPECT_TRUE(saw_zero);
  std::ostringstream out2;
  ASSERT_EQ(cmd_scan(c, out2, err), ok);
  EXPECT_EQ(slurp(dir / "scan.csv"), first);
}

TEST(CmdMap, ThreadCountDoesNotChangeOutput) {
  const fs::path dir = scratch("map");
  Config c = parse_config(R"({"map": {"nq": 21, "np": 21, "q_min": -1, "q_max": 1, "p_min": -1, "p_max": 1}})");
  c.outputs.dir = dir.string();
  std::ostringstream out, err;
  c.map.threads = 1;
  ASSERT_EQ(cmd_map(c, out, err), ok) << err.str();
  const std::string one = slurp(dir / "map.csv");
  c.map.threads = 4;
  ASSERT_EQ(cmd_map(c, out, err), ok) << err.str();
  EXPECT_EQ(slurp(dir / "map.csv"), one);

  const auto rows = read_csv(dir / "map.csv");
  ASSERT_EQ(rows.size(), 21u * 21u + 1u);
  bool found = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::stod(rows[i][0]) == 0.0 && std::stod(rows[i][1]) == 0.0) {
      found = true;
      EXPECT_EQ(rows[i][4], "degenerate");
    }
  }
  EXPECT_TRUE(found);
}

TEST(Binary, ExitCodes) {
  const fs::path dir = scratch("binary");
  const std::string out = " --out " + dir.string();

  const fs::path zero = write_config(dir, R"({"state": [0.5, 0, 0.2, 0.0], "steps": 0})");
  EXPECT_EQ(run_binary("run --config " + zero.string() + out, dir).code, 1);

  std::ofstream(dir / "broken.json") << "{\"steps\": ";
  EXPECT_EQ(run_binary("run --config " + (dir / "broken.json").string() + out, dir).code, 1);

  // H = -0.01 + ... < 0 with psi > 0: no forward multiplier.
  const double wp = -0.01 - 0.5 * 0.04 + std::cos(0.5);
  const fs::path neg =
      write_config(dir, "{\"state\": [0.5, 0, 0.2, " + format_number(wp) + "], \"steps\": 5}");
  const Exit e = run_binary("run --config " + neg.string() + out, dir);
  EXPECT_EQ(e.code, 2);
  EXPECT_NE(e.err.find("none (EU_1(i))"), std::string::npos) << e.err;

  EXPECT_EQ(run_binary("run --lambda-target 0.1" + out, dir).code, 1);
  EXPECT_EQ(run_binary("verify --k-scale 0.5" + out, dir).code, 3);
  EXPECT_EQ(run_binary("verify --model free" + out, dir).code, 0);
  EXPECT_EQ(run_binary("run --q0 1 --p0 0.5 --steps 20 --lambda-target 0.1" + out, dir).code, 0);
}
