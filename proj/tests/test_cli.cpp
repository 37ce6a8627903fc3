#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

Result run(std::string const& args) {
  std::string const cmd = std::string(BOHMSIM_EXE) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  int const status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(fs::path const& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string without_timestamp(std::string const& report) {
  std::istringstream in(report);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.rfind("timestamp = ", 0) != 0) out += line + "\n";
  }
  return out;
}

fs::path scratch(std::string const& name) {
  fs::path const p = fs::temp_directory_path() / ("bohmsim_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string const kConfig = std::string("--config ") + BOHMSIM_DEFAULT_CONFIG;

}  // namespace

TEST(Cli, SimulateHbdWritesArtifacts) {
  auto const dir = scratch("hbd");
  auto const r = run("simulate-hbd " + kConfig + " --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(dir / "trajectory_hbd.csv"));
  EXPECT_TRUE(fs::exists(dir / "config_resolved.json"));
  auto const report = slurp(dir / "report.txt");
  EXPECT_EQ(report.rfind("command = simulate-hbd\nconfig_hash = ", 0), 0u);
  EXPECT_NE(report.find("valid = true"), std::string::npos);
  auto const csv = slurp(dir / "trajectory_hbd.csv");
  EXPECT_EQ(csv.rfind("# command=simulate-hbd", 0), 0u);
}

TEST(Cli, SuperluminalFoliationIsRejected) {
  auto const dir = scratch("superluminal");
  auto const r = run("simulate-hbd " + kConfig + " --set foliation.kind=flat foliation.velocity=1.2 --out " +
                     dir.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("foliation.velocity"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, UnknownKeysAndCommandsAreRejected) {
  auto const r = run("simulate-hbd " + kConfig + " --set hbd.stepsize=0.1 --out " + scratch("unknown").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("hbd.stepsize"), std::string::npos) << r.output;
  EXPECT_EQ(run("teleport " + kConfig).code, 2);
  EXPECT_EQ(run("simulate-hbd --config /nonexistent/config.json").code, 2);
}

TEST(Cli, MissingEventIsAValidationError) {
  auto const dir = scratch("noevent");
  auto const r = run("pstar --set pstar.samples=100 --out " + dir.string());
  EXPECT_EQ(r.code, 2) << r.output;
  EXPECT_NE(r.output.find("pstar.event"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, FailureBudgetExceededExitsThree) {
  auto const dir = scratch("budget");
  auto const r = run("equivariance " + kConfig +
                     " --set ensemble.samples=200 hbd.node_floor=1e300 ensemble.failure_budget=0 --out " +
                     dir.string());
  EXPECT_EQ(r.code, 3) << r.output;
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, RerunIsByteIdenticalApartFromTimestamp) {
  std::string const args = "equivariance " + kConfig + " --set ensemble.samples=300 ensemble.bins=10";
  auto const a = scratch("rerun_a");
  auto const b = scratch("rerun_b");
  ASSERT_EQ(run(args + " --threads 1 --out " + a.string()).code, 0);
  ASSERT_EQ(run(args + " --threads 2 --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "histogram_equivariance.csv"), slurp(b / "histogram_equivariance.csv"));
  EXPECT_EQ(slurp(a / "config_resolved.json").size() > 0, true);
  EXPECT_EQ(without_timestamp(slurp(a / "report.txt")), without_timestamp(slurp(b / "report.txt")));
  auto const c = scratch("rerun_c");
  ASSERT_EQ(run(args + " --seed 99 --out " + c.string()).code, 0);
  EXPECT_NE(slurp(a / "histogram_equivariance.csv"), slurp(c / "histogram_equivariance.csv"));
}

TEST(Cli, OverlapCheckWithControl) {
  auto const dir = scratch("overlap");
  auto const r = run("overlap-check " + kConfig + " --set hbd.s1=1 --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.output;
  auto const report = slurp(dir / "report.txt");
  EXPECT_NE(report.find("same_trajectory = true"), std::string::npos);
  EXPECT_NE(report.find("control_margin0_differs = true"), std::string::npos);
}
