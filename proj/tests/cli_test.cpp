#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = planettt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  EXPECT_TRUE(in) << path;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden(const std::string& name) { return slurp(std::string(PLANETTT_GOLDEN_DIR) + "/" + name); }
std::string data(const std::string& name) { return std::string(PLANETTT_DATA_DIR) + "/" + name; }

std::string without_time(const std::string& s) {
  return std::regex_replace(s, std::regex("time: [^\n]*\n"), "");
}

}  // namespace

TEST(Cli, Version) {
  const CliRun r = run({"--version"});
  EXPECT_EQ(r.code, planettt::cli::kOk);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, PlaneBuildMatchesGoldens) {
  EXPECT_EQ(run({"plane", "build", "--order", "4"}).out, slurp(data("golden/pi4.plane")));
  EXPECT_EQ(run({"--format", "json", "plane", "build", "--order", "4"}).out, slurp(data("golden/pi4.json")));
  EXPECT_EQ(run({"plane", "build", "--order", "4", "--emit", "mols"}).out, slurp(data("golden/fig1_mols.txt")));
  EXPECT_EQ(run({"plane", "build", "--order", "4", "--emit", "td"}).out, slurp(data("golden/td54.txt")));
  EXPECT_EQ(run({"plane", "build", "--order", "4", "--emit", "rtd"}).out, slurp(data("golden/rtd44.txt")));
}

TEST(Cli, PlaneBuildOtherOrders) {
  EXPECT_EQ(run({"plane", "build", "--order", "5", "--from", "field"}).code, 0);
  EXPECT_EQ(run({"plane", "build", "--order", "3", "--from", "mols"}).code, 0);
  EXPECT_NE(run({"plane", "build", "--order", "6"}).code, 0);
}

TEST(Cli, PlaneValidate) {
  CliRun r = run({"plane", "validate", data("golden/pi4.plane")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "ok: 16 points, 20 lines, 5 parallel classes\n");
  std::string text = slurp(data("golden/pi4.plane"));
  text.replace(text.find("line r1 c1 a1 b1"), 16, "line r1 c1 a1 b2");
  const auto path = std::filesystem::temp_directory_path() / "planettt_cli_broken.plane";
  std::ofstream(path) << text;
  r = run({"plane", "validate", path.string()});
  EXPECT_EQ(r.code, planettt::cli::kFailed);
  EXPECT_EQ(r.out.rfind("invalid", 0), 0u);
  EXPECT_NE(r.out.find("violation:"), std::string::npos);
  std::filesystem::remove(path);
  EXPECT_EQ(run({"plane", "validate", "/nonexistent/file"}).code, planettt::cli::kFailed);
}

TEST(Cli, SolveGoldens) {
  EXPECT_EQ(without_time(run({"solve", "--plane", "pi3"}).out), golden("solve_pi3.txt"));
  EXPECT_EQ(without_time(run({"solve", "--plane", "ttt3"}).out), golden("solve_ttt3.txt"));
}

TEST(Cli, SolveTextAndJsonAgree) {
  const CliRun text = run({"solve", "--plane", "pi2"});
  const CliRun js = run({"--format", "json", "solve", "--plane", "pi2"});
  ASSERT_EQ(js.code, 0);
  const auto j = nlohmann::json::parse(js.out);
  EXPECT_NE(text.out.find("value: " + j["value"].get<std::string>()), std::string::npos);
  EXPECT_NE(text.out.find("nodes: " + std::to_string(j["nodes"].get<int>())), std::string::npos);
  EXPECT_NE(text.out.find("pv: " + j["pv"].get<std::string>()), std::string::npos);
}

TEST(Cli, SolveFromRecordAndUsageErrors) {
  const CliRun r = run({"solve", "--record", "r1, (r2), r3, (c1), a2, (r4), c2, (!b2), a4, (!b1), c4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("value: FirstPlayerWin"), std::string::npos);
  EXPECT_EQ(run({"solve", "--symmetry", "--no-symmetry"}).code, planettt::cli::kUsage);
  EXPECT_EQ(run({"solve", "--plane", "pi4", "--projective"}).code, planettt::cli::kUsage);
  EXPECT_EQ(run({"solve", "--plane", "no-such-plane"}).code, planettt::cli::kFailed);
  EXPECT_EQ(run({"solve", "--record", "r1, (r1)"}).code, planettt::cli::kFailed);
  EXPECT_EQ(run({"solve", "--plane", "pi3", "--projective"}).code, 0);
}

TEST(Cli, VerifyStrategy) {
  CliRun r = run({"verify-strategy"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("leaves: 61035\n"), std::string::npos);
  EXPECT_NE(r.out.find("length_histogram: 9:15720 11:21150 13:17505 15:6660\n"), std::string::npos);
  EXPECT_NE(r.out.find("result: every playout is a Xeno win"), std::string::npos);
  r = run({"--format", "json", "verify-strategy", "--relabel-seed", "9"});
  EXPECT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["leaves"], 61035);
  EXPECT_EQ(j["xeno_wins"], 61035);
}

TEST(Cli, VerifyStrategyReportsBrokenTables) {
  std::string text = slurp(data("strategy/pi4.tables"));
  const std::string from = "line (c2), a1,";
  text.replace(text.find(from), from.size(), "line (c2), c4,");
  const auto path = std::filesystem::temp_directory_path() / "planettt_cli_broken.tables";
  std::ofstream(path) << text;
  const CliRun r = run({"verify-strategy", "--tables", path.string()});
  EXPECT_EQ(r.code, planettt::cli::kFailed);
  EXPECT_NE(r.out.find("refutation"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, ReplayGoldens) {
  EXPECT_EQ(run({"replay", data("records/intro-game.rec")}).out, golden("replay_intro.txt"));
  EXPECT_EQ(run({"--format", "json", "replay", data("records/intro-game.rec")}).out, golden("replay_intro.json"));
  const CliRun xw = run({"replay", data("records/intro-game-xw.rec")});
  EXPECT_NE(xw.out.find("XW(b3,b4)"), std::string::npos);
}

TEST(Cli, ReplayErrors) {
  EXPECT_EQ(run({"replay", "--record", "r1, (r1)"}).code, planettt::cli::kFailed);
  EXPECT_EQ(run({"replay"}).code, planettt::cli::kUsage);
  EXPECT_EQ(run({"replay", data("records/intro-game.rec"), "--record", "r1"}).code, planettt::cli::kUsage);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, planettt::cli::kUsage);
  EXPECT_EQ(run({"bogus"}).code, planettt::cli::kUsage);
  EXPECT_EQ(run({"--format", "xml", "solve"}).code, planettt::cli::kUsage);
  EXPECT_EQ(run({"--help"}).code, planettt::cli::kOk);
}
