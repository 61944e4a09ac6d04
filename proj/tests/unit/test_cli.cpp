#include <gtest/gtest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <nlohmann/json.hpp>

#include "fixtures.hpp"

namespace {

namespace fs = std::filesystem;
using corf::testing::read_text;
using corf::testing::TempDir;
using corf::testing::write_text;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run corf_cli(const std::string& args, const TempDir& scratch) {
  const auto out = scratch / "stdout.txt";
  const auto err = scratch / "stderr.txt";
  const std::string cmd = std::string("'") + CORF_CLI_PATH + "' " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text(out);
  r.err = read_text(err);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// One small simulated dataset shared by every test.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    data_ = new TempDir;
    TempDir scratch;
    const auto r = corf_cli("simulate --n 40 --p 60 --n-informative 6 --seed 3 --out " + q(data_->path()), scratch);
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete data_;
    data_ = nullptr;
  }

  static std::string inputs() {
    const auto& d = data_->path();
    return " --primary " + q(d / "primary.csv") + " --labels " + q(d / "labels.csv") + " --codata " +
           q(d / "codata.csv") + " --schema " + q(d / "schema.json");
  }

  static TempDir* data_;
  TempDir scratch_;
};

TempDir* Cli::data_ = nullptr;

void expect_one_line_error(const Run& r) {
  EXPECT_EQ(r.err.rfind("corf: error: ", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
}

TEST_F(Cli, SimulateWritesDataset) {
  for (const char* name : {"primary.csv", "labels.csv", "codata.csv", "schema.json", "truth.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(data_->path() / name)) << name;
  }
}

TEST_F(Cli, FitPredictReport) {
  const auto out = scratch_ / "fit";
  auto r = corf_cli("fit" + inputs() + " --ntree 60 --threads 2 --out " + q(out), scratch_);
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"model.corf", "roc_base.csv", "roc_corf.csv", "codata_curves.csv", "weights.csv",
                           "metrics.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(out / name)) << name;
  }

  const auto pred = scratch_ / "pred";
  r = corf_cli("predict --model " + q(out / "model.corf") + " --primary " + q(data_->path() / "primary.csv") +
                   " --labels " + q(data_->path() / "labels.csv") + " --out " + q(pred),
               scratch_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(pred / "predictions.csv"));
  EXPECT_TRUE(fs::exists(pred / "predict_metrics.json"));

  const auto rep = scratch_ / "rep";
  r = corf_cli("report --model " + q(out / "model.corf") + " --out " + q(rep), scratch_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_text(rep / "weights.csv"), read_text(out / "weights.csv"));
  EXPECT_EQ(read_text(rep / "codata_curves.csv"), read_text(out / "codata_curves.csv"));
}

TEST_F(Cli, TuneAndCv) {
  auto r = corf_cli("tune" + inputs() + " --ntree 40 --gamma-grid 0,1 --out " + q(scratch_ / "tune"), scratch_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(scratch_ / "tune" / "gamma_scores.csv"));
  r = corf_cli("cv" + inputs() + " --ntree 40 --folds 3 --out " + q(scratch_ / "cv"), scratch_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(scratch_ / "cv" / "cv_predictions.csv"));
  const auto summary = nlohmann::json::parse(read_text(scratch_ / "cv" / "cv_summary.json"));
  EXPECT_FALSE(summary.empty());
}

TEST_F(Cli, TuneWithoutGridIsInputError) {
  const auto r = corf_cli("tune" + inputs() + " --ntree 10 --out " + q(scratch_ / "t"), scratch_);
  EXPECT_EQ(r.code, 2);
  expect_one_line_error(r);
}

TEST_F(Cli, EqualManifestsGiveIdenticalOutputs) {
  const auto a = scratch_ / "a";
  const auto b = scratch_ / "b";
  ASSERT_EQ(corf_cli("fit" + inputs() + " --ntree 50 --seed 7 --threads 1 --out " + q(a), scratch_).code, 0);
  ASSERT_EQ(corf_cli("fit" + inputs() + " --ntree 50 --seed 7 --threads 3 --out " + q(b), scratch_).code, 0);
  EXPECT_EQ(read_text(a / "manifest.json"), read_text(b / "manifest.json"));
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto name = entry.path().filename();
    EXPECT_EQ(read_text(a / name), read_text(b / name)) << name;
    ++compared;
  }
  EXPECT_GE(compared, 7u);
  const auto manifest = nlohmann::json::parse(read_text(a / "manifest.json"));
  EXPECT_EQ(manifest.at("seed").get<int>(), 7);
  EXPECT_EQ(manifest.at("inputs").at("primary").at("crc32").get<std::string>().size(), 8u);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  write_text(scratch_ / "c.json", R"({"ntree": 30, "seed": 2})");
  const auto out = scratch_ / "cfg";
  const auto r = corf_cli("fit --config " + q(scratch_ / "c.json") + inputs() + " --seed 5 --out " + q(out), scratch_);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = nlohmann::json::parse(read_text(out / "manifest.json"));
  EXPECT_EQ(manifest.at("seed").get<int>(), 5);
  EXPECT_EQ(manifest.at("params").at("ntree").get<int>(), 30);
}

TEST_F(Cli, UnknownConfigKeyIsInputError) {
  write_text(scratch_ / "c.json", R"({"trees": 30})");
  const auto r = corf_cli("fit --config " + q(scratch_ / "c.json") + inputs() + " --out " + q(scratch_ / "o"), scratch_);
  EXPECT_EQ(r.code, 2);
  expect_one_line_error(r);
}

TEST_F(Cli, MissingInputFileIsInputError) {
  const auto r = corf_cli("fit --primary " + q(scratch_ / "absent.csv") + " --labels " + q(scratch_ / "l.csv") +
                              " --codata x --schema y --out " + q(scratch_ / "o"),
                          scratch_);
  EXPECT_EQ(r.code, 2);
  expect_one_line_error(r);
  EXPECT_NE(r.err.find("file not found"), std::string::npos);
}

TEST_F(Cli, BadFlagIsUsageError) {
  const auto r = corf_cli("fit --no-such-flag", scratch_);
  EXPECT_EQ(r.code, 2);
  const auto r2 = corf_cli("fit" + inputs() + " --criterion f1 --out " + q(scratch_ / "o"), scratch_);
  EXPECT_EQ(r2.code, 2);
}

TEST_F(Cli, CorruptModelIsIoError) {
  write_text(scratch_ / "bad.corf", "this is not a model");
  const auto r = corf_cli("predict --model " + q(scratch_ / "bad.corf") + " --primary " +
                              q(data_->path() / "primary.csv") + " --out " + q(scratch_ / "p"),
                          scratch_);
  EXPECT_EQ(r.code, 4);
  expect_one_line_error(r);
  EXPECT_NE(r.err.find("not a CoRF model"), std::string::npos);
}

TEST_F(Cli, PredictSubsetNeedsFlag) {
  const auto out = scratch_ / "fit";
  ASSERT_EQ(corf_cli("fit" + inputs() + " --ntree 20 --out " + q(out), scratch_).code, 0);
  // Drop the last column of the primary matrix.
  std::string trimmed;
  std::istringstream in(read_text(data_->path() / "primary.csv"));
  for (std::string line; std::getline(in, line);) trimmed += line.substr(0, line.rfind(',')) + "\n";
  write_text(scratch_ / "partial.csv", trimmed);
  const std::string base = "predict --model " + q(out / "model.corf") + " --primary " + q(scratch_ / "partial.csv");
  auto r = corf_cli(base + " --out " + q(scratch_ / "p1"), scratch_);
  EXPECT_EQ(r.code, 2);
  expect_one_line_error(r);
  r = corf_cli(base + " --allow-subset --out " + q(scratch_ / "p2"), scratch_);
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(Cli, EnvironmentThreadFallback) {
  const auto out = scratch_ / "env";
  const std::string args = "fit" + inputs() + " --ntree 20 --out " + q(out);
  ASSERT_EQ(setenv("CORF_THREADS", "2", 1), 0);
  const auto r = corf_cli(args, scratch_);
  unsetenv("CORF_THREADS");
  EXPECT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(setenv("CORF_THREADS", "lots", 1), 0);
  const auto bad = corf_cli(args, scratch_);
  unsetenv("CORF_THREADS");
  EXPECT_EQ(bad.code, 2);
}

}  // namespace
