// Copyright 2026 The unipark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "unipark/cli.hpp"

namespace unipark {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::initializer_list<std::string> args) {
  std::vector<std::string> store{"unipark"};
  store.insert(store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : store) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("UNIPARK_OUT");
    dir_ = fs::temp_directory_path() /
           ("unipark_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    unsetenv("UNIPARK_OUT");
    fs::remove_all(dir_);
  }
  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }
  fs::path dir_;
};

/// Rows of trajectory.csv as numbers, header dropped.
std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(slurp(p));
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    std::vector<double> r;
    for (const auto& tok : cli::split(line, ',')) r.push_back(std::stod(tok));
    rows.push_back(r);
  }
  return rows;
}

TEST_F(CliTest, SimulateWritesArtifacts) {
  const CliRun r = run({"simulate", "--controller", "globa", "--gains", "1,1,1,1", "--init-cart", "2,2,0",
                     "--out", out("a")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "a" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "trajectory.svg"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "trajectory.json"));
  const json s = json::parse(r.out);
  EXPECT_EQ(s["summary"]["termination"], "converged");
  EXPECT_EQ(s["schema_version"], 1);
  const std::string csv = slurp(dir_ / "a" / "trajectory.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x,y,theta,rho,delta,gamma,v,omega,V,metric");
  const std::string svg = slurp(dir_ / "a" / "trajectory.svg");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_EQ(svg.find("href="), std::string::npos);
}

TEST_F(CliTest, MissingControllerIsUsageError) {
  const CliRun r = run({"simulate", "--init-cart", "1,1,0", "--out", out("b")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("controller"), std::string::npos);
  EXPECT_EQ(run({"simulate", "--controller", "genova", "--bogus", "1"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"simulate", "--controller", "genova", "--init-cart", "1,1", "--out", out("b")}).code, 2);
  EXPECT_EQ(run({"simulate", "--controller", "genova", "--init-cart", "1,1,0", "--format", "png",
                 "--out", out("b")})
                .code,
            2);
}

TEST_F(CliTest, FramesAgree) {
  for (const char* frame : {"polar", "cartesian"}) {
    const CliRun r = run({"simulate", "--controller", "bagal", "--init-polar", "1.5,0.7,-1.2", "--frame", frame,
                       "--convention", "tracked", "--t-max", "10", "--tol", "1e-12", "--format", "csv",
                       "--out", out(frame)});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto a = read_csv(dir_ / "polar" / "trajectory.csv");
  const auto b = read_csv(dir_ / "cartesian" / "trajectory.csv");
  ASSERT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int c = 1; c <= 6; ++c) worst = std::max(worst, std::abs(a[i][c] - b[i][c]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST_F(CliTest, ScenarioFileWithOverrides) {
  std::ofstream(dir_ / "s.json") << R"({"schema_version": 1, "controller": "bofo", "gains": [1, 2, 3],
    "init_polar": [1, 0.5, 0.2], "t_max": 50})";
  const CliRun r = run({"simulate", "--scenario", (dir_ / "s.json").string(), "--controller", "glofo",
                     "--format", "json", "--out", out("c")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json t = json::parse(slurp(dir_ / "c" / "trajectory.json"));
  EXPECT_EQ(t["scenario"]["controller"], "glofo");
  EXPECT_EQ(t["scenario"]["gains"][1], 2.0);
  std::ofstream(dir_ / "bad.json") << R"({"controller": "bofo", "colour": "red"})";
  EXPECT_EQ(run({"simulate", "--scenario", (dir_ / "bad.json").string(), "--out", out("c")}).code, 2);
  EXPECT_EQ(run({"simulate", "--scenario", (dir_ / "missing.json").string(), "--out", out("c")}).code, 2);
}

TEST_F(CliTest, EnvironmentOverridesOut) {
  setenv("UNIPARK_OUT", out("env").c_str(), 1);
  const CliRun r = run({"simulate", "--controller", "genova", "--init-cart", "1,1,0", "--format", "csv",
                     "--out", out("flag")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "env" / "trajectory.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "flag"));
}

TEST_F(CliTest, GainsPassivity) {
  const CliRun r = run({"gains", "--family", "passivity", "--poles", "−1, −0.5±0.8660i"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const json& k = j["solutions"][0]["gains"];
  EXPECT_NEAR(k["k1"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(k["k2"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(k["k3"].get<double>(), 1.0, 1e-4);
  EXPECT_LT(j["solutions"][0]["eigenvalue_error"].get<double>(), 1e-10);
}

TEST_F(CliTest, GainsStrictInfeasible) {
  const CliRun r = run({"gains", "--family", "passivity", "--strict", "--poles=-1,-1,-2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("k2^2"), std::string::npos);
}

TEST_F(CliTest, GainsBackstepping) {
  const CliRun r = run({"gains", "--family", "backstepping", "--poles=-1,-2,-3", "--epsilon", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const json& k = j["solutions"][0]["gains"];
  EXPECT_DOUBLE_EQ(k["k1"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(k["k2"].get<double>(), 1.5);
  EXPECT_DOUBLE_EQ(k["k3"].get<double>(), 0.75);
  EXPECT_DOUBLE_EQ(k["k4"].get<double>(), 3.5);
  EXPECT_EQ(run({"gains", "--family", "backstepping", "--poles=-1,-2"}).code, 2);
  EXPECT_EQ(run({"gains", "--family", "lqr", "--poles=-1,-2,-3"}).code, 2);
}

TEST(PoleParser, Forms) {
  const PoleSpec a = cli::parse_poles("-1, -0.5+-0.8i");
  EXPECT_EQ(a.p1, 1.0);
  EXPECT_EQ(a.p2, Complex(0.5, 0.8));
  const PoleSpec b = cli::parse_poles("-2,-1+2i,-1-2i");
  EXPECT_EQ(b.p2, Complex(1, 2));
  EXPECT_EQ(b.p3, Complex(1, -2));
  const PoleSpec c = cli::parse_poles("−1,−1e-1,−3E+0");
  EXPECT_EQ(c.p2, Complex(0.1, 0));
  EXPECT_EQ(c.p3, Complex(3, 0));
  EXPECT_THROW(cli::parse_poles("-1,x,-2"), ConfigError);
  EXPECT_THROW(cli::parse_poles("1,-1,-2"), ConfigError);
}

TEST_F(CliTest, VerifyPasses) {
  const CliRun r = run({"verify", "--samples", "100", "--out", out("v")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(dir_ / "v" / "verify.json"));
  EXPECT_TRUE(j["all_passed"].get<bool>());
  bool saw_bounds = false;
  for (const auto& c : j["checks"]) {
    if (c["name"] == "sinc_bound" || c["name"] == "cos_bound") {
      saw_bounds = true;
      EXPECT_GE(c["worst"].get<double>(), -1e-12);
    }
  }
  EXPECT_TRUE(saw_bounds);
}

TEST_F(CliTest, SweepOverlayAndDeterminism) {
  const std::vector<std::string> common = {"sweep", "--controllers", "barfli,globa", "--gains", "1,1,0.1,1",
                                           "--preset", "front", "--t-max", "40"};
  auto go = [&](const std::string& o) {
    std::vector<const char*> argv{"unipark"};
    for (const auto& s : common) argv.push_back(s.c_str());
    const std::string flag = "--out=" + o;
    argv.push_back(flag.c_str());
    std::ostringstream so, se;
    return run_cli(static_cast<int>(argv.size()), argv.data(), so, se);
  };
  EXPECT_NE(go(out("s1")), 2);
  EXPECT_NE(go(out("s2")), 2);
  for (const char* f : {"sweep.json", "sweep.txt", "overlay.svg"}) {
    ASSERT_TRUE(fs::exists(dir_ / "s1" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "s1" / f), slurp(dir_ / "s2" / f)) << f;
  }
  const json j = json::parse(slurp(dir_ / "s1" / "sweep.json"));
  ASSERT_EQ(j["runs"].size(), 2u);
  EXPECT_EQ(j["runs"][0]["controller"], "barfli");
  for (const auto& row : j["runs"][0]["rows"]) EXPECT_EQ(row["front_crossings"], 0);
}

TEST_F(CliTest, SweepEmptyGridIsUsageError) {
  std::ofstream(dir_ / "g.json") << "[]";
  const CliRun r = run({"sweep", "--controller", "genova", "--grid", (dir_ / "g.json").string(), "--out",
                     out("e")});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(run({"sweep", "--controller", "genova", "--out", out("e")}).code, 2);
}

TEST_F(CliTest, SweepRandomAndGridFile) {
  std::ofstream(dir_ / "g.json") << R"([{"cart": [1, -1, 0]}, {"polar": [1, 0.5, -0.5]}])";
  CliRun r = run({"sweep", "--controller", "bofo", "--grid", (dir_ / "g.json").string(), "--out", out("f")});
  EXPECT_EQ(r.code, 0) << r.err;
  r = run({"sweep", "--controller", "libac", "--random", "4", "--seed", "3", "--threads", "2", "--out",
           out("g")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(slurp(dir_ / "g" / "sweep.json"))["runs"][0]["rows"].size(), 4u);
}

#ifdef UNIPARK_BIN
TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = UNIPARK_BIN;
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " simulate --init-cart 1,1,0 2>/dev/null").c_str())), 2);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " --help >/dev/null").c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " gains --family passivity --strict --poles=-1,-1,-1 "
                                           ">/dev/null 2>&1")
                                        .c_str())),
            1);
}
#endif

}  // namespace
}  // namespace unipark
