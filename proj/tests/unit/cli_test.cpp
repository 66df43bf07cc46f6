#include <gtest/gtest.h>

#include <unistd.h>

#include <fstream>

#include "support.hpp"

namespace {

support::CommandResult cli(const std::string& args) { return support::run_command(support::cli_path() + " " + args); }

std::string M(const std::string& rel) { return (support::models_dir() / rel).string(); }
std::string F(const std::string& rel) { return (support::fixtures_dir() / rel).string(); }

const char* kSafety = "'detected implies (not active(0) and not active(1) and not active(2))'";

}  // namespace

TEST(Cli, RunPrintsFinalState) {
  auto r = cli("run " + M("swap.asm") + " --steps 1");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("a = 2"), std::string::npos);
  EXPECT_NE(r.out.find("b = 1"), std::string::npos);
}

TEST(Cli, RunInconsistentIsSemanticFailure) {
  auto r = cli("run " + F("clash.asm"));
  EXPECT_EQ(r.status, 1) << r.out;
  EXPECT_NE(r.out.find("x"), std::string::npos);
}

TEST(Cli, RunInputErrors) {
  auto syntax = cli("run " + F("broken.asm"));
  EXPECT_EQ(syntax.status, 2);
  EXPECT_NE(syntax.out.find("broken.asm:7:"), std::string::npos) << syntax.out;
  EXPECT_EQ(cli("run " + F("unknown_function.asm")).status, 2);
  EXPECT_EQ(cli("run " + F("missing.asm")).status, 2);
  EXPECT_EQ(cli("run").status, 2);
  EXPECT_EQ(cli("frobnicate").status, 2);
  EXPECT_EQ(cli("run " + M("swap.asm") + " --steps many").status, 2);
}

TEST(Cli, RunTraceReplays) {
  auto trace = std::filesystem::temp_directory_path() / ("asmweave_cli_" + std::to_string(::getpid()) + ".jsonl");
  auto a = cli("run " + M("pending_set.asm") + " --steps 12 --seed 7 --trace " + trace.string());
  ASSERT_EQ(a.status, 0) << a.out;
  auto b = cli("run " + M("pending_set.asm") + " --steps 12 --seed 1234 --script " + trace.string());
  EXPECT_EQ(b.status, 0);
  EXPECT_EQ(a.out, b.out);
  std::filesystem::remove(trace);
}

TEST(Cli, SeedFromEnvironment) {
  std::string run = " " + support::cli_path() + " run " + M("choose_out.asm") + " --steps 5";
  auto a = support::run_command("ASMWEAVE_SEED=3" + run);
  auto b = support::run_command(support::cli_path() + " run " + M("choose_out.asm") + " --steps 5 --seed 3");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ScenarioSuites) {
  EXPECT_EQ(cli("scenario " + M("scenarios")).status, 0);
  auto failing = cli("scenario " + M("scenarios_failing"));
  EXPECT_EQ(failing.status, 1);
  EXPECT_NE(failing.out.find("1 failed"), std::string::npos) << failing.out;
  EXPECT_EQ(cli("scenario " + F("malformed_suite")).status, 2);
  EXPECT_EQ(cli("scenario " + F("swap_wrong.scn")).status, 1);
  EXPECT_EQ(cli("scenario " + M("scenarios/swap.scn") + " --json").status, 0);
}

TEST(Cli, CheckRefine) {
  auto ok = cli("check-refine " + M("refinement/chain.ref"));
  EXPECT_EQ(ok.status, 0) << ok.out;
  auto bad = cli("check-refine " + M("refinement/broken_chain.ref"));
  EXPECT_EQ(bad.status, 1);
  EXPECT_NE(bad.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(cli("check-refine " + F("bad_manifest.ref")).status, 2);
}

TEST(Cli, Explore) {
  EXPECT_EQ(cli("explore " + M("termination.asm") + " --depth 12 --assert " + kSafety).status, 0);
  auto bad = cli("explore " + M("termination_mutant.asm") + " --depth 12 --assert " + kSafety);
  EXPECT_EQ(bad.status, 1);
  EXPECT_EQ(cli("explore " + M("swap.asm") + " --assert 'a +'").status, 2);
}

TEST(Cli, Normalize) {
  auto ok = cli("normalize " + M("swap.asm"));
  EXPECT_EQ(ok.status, 0) << ok.out;
  EXPECT_NE(ok.out.find("if true then"), std::string::npos) << ok.out;
  EXPECT_EQ(cli("normalize " + M("choose_out.asm")).status, 1);
  EXPECT_EQ(cli("normalize " + M("swap.asm") + " --rule Nope").status, 2);
}

TEST(Cli, FmtAndSkeleton) {
  auto f = cli("fmt --stdout " + M("swap.asm"));
  EXPECT_EQ(f.status, 0);
  EXPECT_NE(f.out.find("machine Swap"), std::string::npos);
  auto s = cli("skeleton " + M("swap.asm"));
  EXPECT_EQ(s.status, 0);
  EXPECT_NE(s.out.find("scenario"), std::string::npos);
  EXPECT_EQ(cli("skeleton " + F("broken.asm")).status, 2);
}
