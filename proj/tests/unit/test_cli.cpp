// Copyright 2026 The kbqa Authors.
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

#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "kbqa/cli.hpp"
#include "kbqa/json_io.hpp"
#include "kbqa/kb.hpp"

namespace kbqa {
namespace {

using testing::fixture_dir;
namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kbqa_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

std::string austen(const std::string& name) { return (fixture_dir() / "austen" / name).string(); }

TEST_F(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
  Result r = cli({"run", "--kb", austen("kb3")});
  EXPECT_EQ(r.code, kExitFatal);
  EXPECT_NE(r.err.find("--dataset"), std::string::npos);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitFatal);
}

TEST_F(Cli, MissingKbNamesThePath) {
  Result r = cli({"run", "--kb", "/no/such/kb", "--dataset", austen("kb3.jsonl"), "--mock", austen("mock.json"), "--out",
                  path("run")});
  EXPECT_EQ(r.code, kExitFatal);
  EXPECT_NE(r.err.find("/no/such/kb"), std::string::npos) << r.err;
}

TEST_F(Cli, KbValidate) {
  EXPECT_EQ(cli({"kb", "validate", "--kb", austen("kb3")}).code, kExitOk);
  fs::copy(austen("kb3"), path("broken"));
  {
    std::ofstream out(path("broken") + "/data.jsonl", std::ios::app);
    out << R"({"s": "m.pp", "r": "book.written_work.author", "o": "m.ghost"})" << "\n";
  }
  Result r = cli({"kb", "validate", "--kb", path("broken")});
  EXPECT_EQ(r.code, kExitItemFailures);
  EXPECT_NE(r.err.find("m.ghost") + r.out.find("m.ghost"), 2 * std::string::npos);
}

TEST_F(Cli, KbDeleteWithPlanMatchesFixture) {
  Result r = cli({"kb", "delete", "--kb", austen("kb3"), "--plan", austen("kb1/deletion_plan.json"), "--out", path("kb1")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(load_kb_dir(path("kb1")), load_kb_dir(austen("kb1")));
  EXPECT_TRUE(fs::exists(path("kb1") + "/deletion_plan.json"));
}

TEST_F(Cli, DatasetInjectAndSample) {
  Result r = cli({"dataset", "inject", "--kb", austen("kb3"), "--dataset", (fixture_dir() / "dataset" / "six.jsonl").string(),
                  "--plan", (fixture_dir() / "dataset" / "six_plan.json").string(), "--out-kb", path("kb"), "--out",
                  path("six.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  r = cli({"dataset", "sample", "--dataset", path("six.jsonl"), "--answerable", "1", "--unanswerable", "2", "--seed",
           "3", "--out", path("shots.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::string shots = slurp(path("shots.jsonl"));
  EXPECT_EQ(std::count(shots.begin(), shots.end(), '\n'), 3);
  r = cli({"dataset", "sample", "--dataset", path("six.jsonl"), "--answerable", "4", "--out", path("x.jsonl")});
  EXPECT_EQ(r.code, kExitFatal);
}

TEST_F(Cli, RunWritesOutputsAndIsDeterministic) {
  for (const char* out : {"a", "b"}) {
    Result r = cli({"run", "--kb", austen("kb2"), "--dataset", austen("kb2.jsonl"), "--mock", austen("mock.json"), "--out",
                    path(out)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  for (const char* f : {"outcomes.jsonl", "traces/q0000.json", "report.json", "report.txt"}) {
    ASSERT_TRUE(fs::exists(path("a") + "/" + f)) << f;
    EXPECT_EQ(slurp(path("a") + "/" + f), slurp(path("b") + "/" + f)) << f;
  }
  EXPECT_TRUE(fs::exists(path("a") + "/manifest.json"));
  Json outcome = Json::parse(slurp(path("a") + "/outcomes.jsonl"));
  EXPECT_EQ(outcome["answer"], "NA");
  EXPECT_NE(outcome["lf"], "NK");
}

TEST_F(Cli, RunFlagsReachTheTrace) {
  Result r = cli({"run", "--kb", austen("kb1"), "--dataset", austen("kb1.jsonl"), "--mock", austen("mock.json"), "--n-iter",
                  "2", "--out", path("run")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json trace = Json::parse(slurp(path("run") + "/traces/q0000.json"));
  EXPECT_EQ(trace["iterations"].size(), 3u);
  Json manifest = Json::parse(slurp(path("run") + "/manifest.json"));
  EXPECT_EQ(manifest.dump().find("\"n_iter\":2") != std::string::npos, true) << manifest.dump();
}

TEST_F(Cli, RunWithMockMissExitsOne) {
  {
    std::ofstream out(path("empty_mock.json"));
    out << "[]";
  }
  Result r = cli({"run", "--kb", austen("kb3"), "--dataset", austen("kb3.jsonl"), "--mock", path("empty_mock.json"), "--out",
                  path("run")});
  EXPECT_EQ(r.code, kExitItemFailures);
  Json outcome = Json::parse(slurp(path("run") + "/outcomes.jsonl"));
  EXPECT_EQ(outcome["lf"], "NK");
  EXPECT_TRUE(outcome["error"].is_string());
}

TEST_F(Cli, EvalOnFourExampleFixture) {
  Result r = cli({"eval", "--pred", (fixture_dir() / "metrics" / "pred.jsonl").string(), "--gold",
                  (fixture_dir() / "metrics" / "gold.jsonl").string(), "--out", path("eval")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  Json report = Json::parse(slurp(path("eval") + "/report.json"));
  EXPECT_NEAR(report["slices"]["overall"]["em_s"].get<double>(), 50.0, 1e-9);
  EXPECT_NE(r.out.find("overall"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("eval") + "/records.csv"));
  r = cli({"eval", "--pred", austen("kb3.jsonl"), "--gold", (fixture_dir() / "metrics" / "gold.jsonl").string()});
  EXPECT_EQ(r.code, kExitFatal);
}

TEST_F(Cli, VerifyReportsEachCheck) {
  Result r = cli({"verify", "--kb", (fixture_dir() / "hiphop" / "kb").string(), "--question", "what genre?", "--lf",
                  "SELECT ?x WHERE { ns:m.0123lk0s ns:music.genre.recordings ?x }", "--entities", "m.0123lk0s"});
  EXPECT_NE(r.out.find("V2a strong FAIL"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("V3 weak skipped"), std::string::npos) << r.out;
  r = cli({"verify", "--kb", austen("kb3"), "--question", "which books were written by jane austen?", "--lf",
           "SELECT DISTINCT ?x WHERE { ?x ns:book.written_work.author ns:m.austen }", "--entities", "m.austen"});
  EXPECT_NE(r.out.find("V2b strong pass"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("m.emma"), std::string::npos) << r.out;
}

TEST_F(Cli, TraceShow) {
  ASSERT_EQ(cli({"run", "--kb", austen("kb3"), "--dataset", austen("kb3.jsonl"), "--mock", austen("mock.json"), "--out",
                 path("run")})
                .code,
            kExitOk);
  Result r = cli({"trace", "show", path("run") + "/traces/q0000.json"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("confident"), std::string::npos) << r.out;
  Result full = cli({"trace", "show", path("run") + "/traces/q0000.json", "--prompts"});
  EXPECT_GT(full.out.size(), r.out.size());
  EXPECT_EQ(cli({"trace", "show", path("missing.json")}).code, kExitFatal);
}

}  // namespace
}  // namespace kbqa
