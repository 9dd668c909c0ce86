// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

const std::string kCli = LAZYCELL_CLI;
const std::filesystem::path kConfigs = LAZYCELL_CONFIG_DIR;
const std::filesystem::path kTmp = std::filesystem::temp_directory_path() / "lazycell_cli_test";

struct Result {
  int status;
  std::string output;
};

// Runs the CLI with stderr merged into the captured output.
Result cli(const std::string& args) {
  const std::string cmd = "'" + kCli + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config(const char* name) { return "'" + (kConfigs / name).string() + "'"; }

struct TmpDir {
  TmpDir() { std::filesystem::create_directories(kTmp); }
  ~TmpDir() { std::filesystem::remove_all(kTmp); }
};

}  // namespace

TEST_CASE("run writes per-UE rows and repeated runs are byte-identical") {
  TmpDir tmp;
  const auto a = kTmp / "a.csv", b = kTmp / "b.csv";
  REQUIRE(cli("run --config " + config("example03_fairness_network.toml") + " --out " + a.string()).status == 0);
  REQUIRE(cli("run --config " + config("example03_fairness_network.toml") + " --out " + b.string()).status == 0);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(text.rfind("ue,serving_cell,rsrp_w,", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 61);
}

TEST_CASE("seed override changes random layouts") {
  const auto a = cli("run --config " + config("example03_fairness_network.toml") + " --seed 1");
  const auto b = cli("run --config " + config("example03_fairness_network.toml") + " --seed 2");
  REQUIRE(a.status == 0);
  REQUIRE(b.status == 0);
  CHECK(a.output != b.output);
}

TEST_CASE("smart and full modes print the same CSV") {
  TmpDir tmp;
  const auto a = kTmp / "smart.csv", b = kTmp / "full.csv";
  CHECK(cli("run --config " + config("bench.toml") + " --out " + a.string()).status == 0);
  CHECK(cli("run --config " + config("bench.toml") + " --no-smart --out " + b.string()).status == 0);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("sweep-fairness reproduces the two-UE endpoints") {
  const auto r = cli("sweep-fairness --config " + config("example03_fairness.toml"));
  REQUIRE(r.status == 0);
  CHECK(r.output.rfind("p,ue,cell,spectral_efficiency,throughput_bps\n", 0) == 0);
  CHECK(r.output.find("\n0,0,0,2,10000000\n") != std::string::npos);
  CHECK(r.output.find("\n0,1,0,1,5000000\n") != std::string::npos);
}

TEST_CASE("sweep-angle honours --points") {
  const auto r = cli("sweep-angle --config " + config("angle_3sector.toml") + " --points 12");
  REQUIRE(r.status == 0);
  CHECK(r.output.rfind("angle_deg,sinr_db,throughput_bps\n", 0) == 0);
  CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 13);
}

TEST_CASE("sweep-distance lists each model") {
  const auto r = cli("sweep-distance --config " + config("example02_pathloss.toml"));
  REQUIRE(r.status == 0);
  CHECK(r.output.find("\nRMa,") != std::string::npos);
  CHECK(r.output.find("\nUMa,") != std::string::npos);
  CHECK(r.output.find("\nUMi,") != std::string::npos);
}

TEST_CASE("a tiny validate-ppp run") {
  const auto r = cli("validate-ppp --cells 10 --ues 5 --seed 3");
  REQUIRE(r.status == 0);
  CHECK(r.output.find("theta_db,empirical,analytical") != std::string::npos);
  CHECK(r.output.find("max_deviation=") != std::string::npos);
}

TEST_CASE("errors are one line with a code and a nonzero exit") {
  TmpDir tmp;
  const auto bad = kTmp / "bad.toml";
  std::ofstream(bad) << "[layout.cells]\nkind = \"explicit\"\npositions = [[0.0, 0.0, 25.0]]\n"
                        "[layout.ues]\nkind = \"explicit\"\npositions = [[9.0, 0.0, 1.5]]\n"
                        "[radio]\nbandwidth_hz = -1.0\n";
  auto r = cli("run --config " + bad.string());
  CHECK(r.status == 2);
  CHECK(r.output.rfind("error code=validation-error field=radio.bandwidth_hz", 0) == 0);
  CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 1);

  r = cli("run --config " + (kTmp / "missing.toml").string());
  CHECK(r.status != 0);
  CHECK(r.output.find("error code=") != std::string::npos);

  r = cli("validate-ppp --alpha 2 --cells 10 --ues 5");
  CHECK(r.status == 2);
  CHECK(r.output.find("error code=validation-error field=ppp.alpha") != std::string::npos);

  CHECK(cli("no-such-command").status != 0);
}
