#include <gtest/gtest.h>

#include <json.hpp>

#include "test_support.hpp"
#include "tsdistill/cli.hpp"
#include "tsdistill/dataset.hpp"
#include "tsdistill/log.hpp"

using namespace tsdistill;
using nlohmann::json;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "tsdistill");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    // Keep test output quiet; restore the default sink afterwards.
    old_sink_ = Logger::global().set_sink([](const LogEvent&) {});
  }
  void TearDown() override { Logger::global().set_sink(old_sink_); }

  std::string dir(const std::string& rel) const { return (tmp_ / rel).string(); }

  testkit::TempDir tmp_;
  Logger::Sink old_sink_;
};

}  // namespace

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"frobnicate"}), 1);
  EXPECT_EQ(run({"build", "--jobs", "many"}), 1);
  EXPECT_EQ(run({"build", "--mock", "--out", dir("ds"), "--n-samples", "0"}), 1);
}

TEST_F(CliTest, BuildThenEvaluate) {
  ASSERT_EQ(run({"build", "--mock", "--out", dir("ds"), "--n-samples", "12", "--n-train", "8"}), 0);
  const auto m = load_manifest(dir("ds"));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->status, BuildStatus::complete);
  EXPECT_EQ(m->n_test(), 4);

  std::string cands;
  for (const auto& s : load_samples(tmp_ / "ds/samples.jsonl"))
    if (s.split == Split::test)
      cands += json{{"id", s.id}, {"text", s.annotation->to_json_pattern()}}.dump() + "\n";
  testkit::write_file(tmp_ / "cands.jsonl", cands);

  ASSERT_EQ(run({"evaluate", "--dataset", dir("ds"), "--candidates", dir("cands.jsonl"), "--jobs", "2"}), 0);
  const auto report = json::parse(testkit::read_file(tmp_ / "ds/eval/report.json"));
  EXPECT_EQ(report["n_samples"], 4);
  EXPECT_EQ(report["metrics"]["feature_trend"], 1.0);
  EXPECT_TRUE(report["metrics"]["cosine"].is_null());

  // Refuses to overwrite without --force.
  EXPECT_EQ(run({"evaluate", "--dataset", dir("ds"), "--candidates", dir("cands.jsonl")}), 1);
  EXPECT_EQ(run({"evaluate", "--dataset", dir("ds"), "--candidates", dir("cands.jsonl"), "--force"}), 0);
}

TEST_F(CliTest, StagewiseCommands) {
  EXPECT_EQ(run({"generate", "--out", dir("ds"), "--n-samples", "6"}), 0);
  // Later stages read the generation settings from the manifest.
  EXPECT_EQ(run({"factcheck", "--out", dir("ds")}), 1);  // not annotated yet
  EXPECT_EQ(run({"annotate", "--mock", "--out", dir("ds")}), 0);
  EXPECT_EQ(run({"factcheck", "--out", dir("ds")}), 0);
  EXPECT_EQ(run({"export-sft", "--out", dir("ds")}), 0);
  EXPECT_EQ(load_manifest(dir("ds"))->status, BuildStatus::complete);
  EXPECT_TRUE(std::filesystem::exists(tmp_ / "ds/sft_train.jsonl"));
  // A different seed against the same directory is refused.
  EXPECT_EQ(run({"generate", "--out", dir("ds"), "--n-samples", "6", "--seed", "3"}), 1);
}

TEST_F(CliTest, UnreachableAnnotatorExitsTwo) {
  const json cfg{{"annotator",
                  {{"endpoint", "http://127.0.0.1:" + std::to_string(testkit::unused_port()) + "/v1/chat"},
                   {"max_retries", 0},
                   {"timeout_s", 2}}},
                 {"n_samples", 4}};
  testkit::write_file(tmp_ / "cfg.json", cfg.dump());
  EXPECT_EQ(run({"build", "--config", dir("cfg.json"), "--out", dir("ds")}), 2);
}

TEST_F(CliTest, UnreachableScorerExitsTwo) {
  const std::string url = "http://127.0.0.1:" + std::to_string(testkit::unused_port());
  EXPECT_EQ(run({"build", "--mock", "--out", dir("ds"), "--n-samples", "4", "--scorer", "remote",
                 "--scorer-url", url}),
            2);
}

TEST_F(CliTest, BadDataExitsThree) {
  testkit::write_file(tmp_ / "v.json", R"([1, "two", 3])");
  EXPECT_EQ(run({"render", "--values", dir("v.json"), "--output", dir("p.png")}), 3);
}

TEST_F(CliTest, Render) {
  EXPECT_EQ(run({"render", "--output", dir("p.png"), "--kappa", "0.2", "--r-bar", "3", "--width", "400",
                 "--height", "300"}),
            0);
  EXPECT_TRUE(std::filesystem::exists(tmp_ / "p.png"));
  EXPECT_EQ(run({"render", "--output", dir("p.png")}), 1);
  EXPECT_EQ(run({"render", "--output", dir("p.png"), "--force"}), 0);
  EXPECT_EQ(run({"render", "--output", dir("q.png"), "--kappa", "2"}), 1);
}
