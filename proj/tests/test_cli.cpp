#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>

#include "mcdm/cli.hpp"
#include "mcdm/io.hpp"
#include "support.hpp"

using testing_support::fixtures;
using testing_support::TempDir;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mcdm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mcdm::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return (fixtures() / name).string(); }

}  // namespace

TEST(Cli, ConsistentWeightsTable) {
  auto r = run({"weights", fx("consistent3/surveys"), "--criteria", fx("consistent3/criteria.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("0.571429"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("0.285714"), std::string::npos);
  EXPECT_NE(r.out.find("0.142857"), std::string::npos);
  EXPECT_NE(r.out.find("aggregate"), std::string::npos);
}

TEST(Cli, WeightsCsvHeader) {
  auto r = run({"weights", fx("consistent3/surveys"), "--criteria", fx("consistent3/criteria.json"), "--format",
                "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "respondent,price,comfort,range,xi_star,consistency_ratio");
}

TEST(Cli, RankTableShowsAllAlternatives) {
  auto r = run({"rank", "--matrix", fx("table2.csv"), "--weights", fx("table1.json"), "--stage", "weighted"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& a : testing_support::table2_alternatives()) EXPECT_NE(r.out.find(a), std::string::npos) << a;
}

TEST(Cli, RankJsonParses) {
  auto r = run({"rank", "--matrix", fx("table2.csv"), "--weights", fx("table1.json"), "--stage", "weighted",
                "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = mcdm::io::Json::parse(r.out);
  EXPECT_EQ(j["ranking"].size(), 9u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"rank", "--matrix", fx("table2.csv")}).code, 1);
  EXPECT_EQ(run({"rank", "--matrix", fx("table2.csv"), "--weights", fx("table1.json"), "--format", "xml"}).code, 1);

  auto missing = run({"pipeline", "--config", "/nonexistent/config.json"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_EQ(missing.err.rfind("error: FileNotFound:", 0), 0u) << missing.err;

  auto no_stage = run({"rank", "--matrix", fx("table2.csv"), "--weights", fx("table1.json")});
  EXPECT_EQ(no_stage.code, 1);
  EXPECT_NE(no_stage.err.find("SchemaError"), std::string::npos);
}

TEST(Cli, PipelineExportReproduce) {
  TempDir tmp;
  const auto store = (tmp.path() / "runs").string();
  auto p = run({"pipeline", "--config", fx("table2.config.json"), "--store", store, "--format", "json"});
  ASSERT_EQ(p.code, 0) << p.err;
  const std::string id = mcdm::io::Json::parse(p.out)["run_id"];

  auto e = run({"export", "--run", id, "--store", store, "--format", "json"});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(e.out, p.out);
  auto csv = run({"export", "--run", id, "--store", store, "--format", "csv"});
  EXPECT_EQ(csv.out.rfind("alternative,s_plus,s_minus,score,rank\n", 0), 0u);

  auto rep = run({"reproduce", "--run", id, "--store", store});
  EXPECT_EQ(rep.code, 0) << rep.err;
  EXPECT_NE(rep.out.find("reproduced byte-identically"), std::string::npos);

  auto unknown = run({"export", "--run", "00000000deadbeef", "--store", store});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("UnknownRun"), std::string::npos);

  auto sens = run({"sensitivity", "--run", id, "--criterion", "cost_of_ownership", "--deltas=-0.1,0,0.1", "--store",
                   store, "--format", "json"});
  ASSERT_EQ(sens.code, 0) << sens.err;
  EXPECT_EQ(mcdm::io::Json::parse(sens.out)["entries"].size(), 3u);
  auto bad = run({"sensitivity", "--run", id, "--criterion", "network_effect", "--deltas=-0.5", "--store", store});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("DeltaOutOfRange"), std::string::npos);
}

TEST(Cli, TcoJson) {
  auto r = run({"tco", "--fleet", fx("fleet.json"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = mcdm::io::Json::parse(r.out);
  EXPECT_FALSE(j["segments"].empty());
  EXPECT_EQ(j["vehicles"].size(), mcdm::io::load_fleet(fixtures() / "fleet.json").size());
}

// The installed binary behaves like the in-process entry point.
TEST(Cli, BinaryExitStatus) {
  const std::string cmd = std::string(MCDM_CLI_PATH) + " pipeline --config /nonexistent.json 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 1);
  FILE* pipe = ::popen((std::string(MCDM_CLI_PATH) + " --help").c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  char buf[256];
  std::string text;
  while (std::fgets(buf, sizeof buf, pipe)) text += buf;
  EXPECT_EQ(::pclose(pipe), 0);
  EXPECT_NE(text.find("pipeline"), std::string::npos);
}
