// Copyright 2026 The HARM Authors.
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

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "harm/config.h"
#include "harm/datagen.h"
#include "harm/report.h"
#include "harm/world.h"
#include "json.hpp"

namespace harm {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("harm_cli_") +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path WriteConfig(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  // Exit status of `harm <args>`; stderr goes to dir_/stderr.txt.
  int Run(const std::string& args) const {
    const std::string cmd = std::string("\"") + HARM_CLI_PATH + "\" " + args +
                            " >/dev/null 2>\"" + (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Slurp(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

constexpr const char* kSmall =
    "data.n = 60\ndata.p = 8\nmodel.hidden = 3\ntrain.epochs = 2\n"
    "bounds.disc_epochs = 2\n";

TEST_F(CliTest, GenDataIsDeterministicAndCreatesOutDir) {
  const fs::path cfg = WriteConfig("run.cfg", kSmall);
  const fs::path a = dir_ / "nested" / "a", b = dir_ / "b";
  ASSERT_EQ(Run("--config " + cfg.string() + " --out " + a.string() + " gen-data"), 0);
  ASSERT_EQ(Run("--config " + cfg.string() + " --out " + b.string() + " gen-data"), 0);
  for (const char* f : {"data/seed0/train.csv", "data/seed0/val.csv",
                        "data/seed0/test.csv", "manifest.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(Slurp(a / f), Slurp(b / f)) << f;
  }
  const auto m = nlohmann::json::parse(Slurp(a / "manifest.json"));
  EXPECT_EQ(m.at("seeds"), nlohmann::json::array({0}));
  EXPECT_EQ(m.at("config_hash").get<std::string>().size(), 64u);
}

TEST_F(CliTest, ManifestHashFollowsConfig) {
  const fs::path one = WriteConfig("one.cfg", kSmall);
  const fs::path two = WriteConfig("two.cfg", std::string(kSmall) + "data.rho = 0.8\n");
  ASSERT_EQ(Run("--config " + one.string() + " --out " + (dir_ / "1").string() +
                " gen-data"), 0);
  ASSERT_EQ(Run("--config " + two.string() + " --out " + (dir_ / "2").string() +
                " gen-data"), 0);
  const auto h1 = nlohmann::json::parse(Slurp(dir_ / "1/manifest.json")).at("config_hash");
  const auto h2 = nlohmann::json::parse(Slurp(dir_ / "2/manifest.json")).at("config_hash");
  EXPECT_NE(h1, h2);
}

TEST_F(CliTest, TwoSeedsGiveTwoCheckpoints) {
  const fs::path cfg = WriteConfig("run.cfg", std::string(kSmall) + "seeds = 3, 4\n");
  const std::string base = "--config " + cfg.string() + " --out " + (dir_ / "o").string();
  ASSERT_EQ(Run(base + " gen-data"), 0);
  ASSERT_EQ(Run(base + " train"), 0);
  const fs::path a = dir_ / "o/models/erm_seed3.harm", b = dir_ / "o/models/erm_seed4.harm";
  ASSERT_TRUE(fs::exists(a));
  ASSERT_TRUE(fs::exists(b));
  EXPECT_NE(Slurp(a), Slurp(b));
  EXPECT_TRUE(fs::exists(dir_ / "o/traces/erm_seed4.csv"));
}

TEST_F(CliTest, SeedFlagOverridesConfig) {
  const fs::path cfg = WriteConfig("run.cfg", std::string(kSmall) + "seeds = 3, 4\n");
  ASSERT_EQ(Run("--config " + cfg.string() + " --out " + (dir_ / "o").string() +
                " --seed 9 gen-data"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "o/data/seed9/train.csv"));
  EXPECT_FALSE(fs::exists(dir_ / "o/data/seed3"));
}

TEST_F(CliTest, WrWithoutAuxFailsBeforeTraining) {
  const fs::path cfg = WriteConfig(
      "run.cfg", "data.kind = world\ntrain.method = erm, wr\ntrain.epochs = 2\n");
  const std::string base = "--config " + cfg.string() + " --out " + (dir_ / "o").string();
  ASSERT_EQ(Run(base + " gen-data"), 0);
  EXPECT_EQ(Run(base + " train"), 1);
  EXPECT_FALSE(fs::exists(dir_ / "o/models/erm_seed0.harm"));
  EXPECT_NE(Slurp(dir_ / "stderr.txt").find("aux"), std::string::npos);
}

TEST_F(CliTest, FullPipelineReportIsByteReproducible) {
  const fs::path cfg = WriteConfig(
      "run.cfg", std::string(kSmall) + "train.method = erm, wt, reg\n");
  for (const char* out : {"x", "y"}) {
    const std::string base = "--config " + cfg.string() + " --out " + (dir_ / out).string();
    for (const char* cmd : {"gen-data", "train", "attack", "report"}) {
      ASSERT_EQ(Run(base + " " + cmd), 0) << cmd;
    }
  }
  EXPECT_EQ(Slurp(dir_ / "x/report.csv"), Slurp(dir_ / "y/report.csv"));
  EXPECT_EQ(Slurp(dir_ / "x/report.svg"), Slurp(dir_ / "y/report.svg"));
  const auto rows = ReadReportCsv(dir_ / "x/report.csv");
  ASSERT_EQ(rows.size(), 3u);
  for (const ReportRow& r : rows) {
    EXPECT_EQ(r.report.bound_c, r.report.train_err + r.report.c + r.report.phi);
  }
}

TEST_F(CliTest, IdenticalSourceAndTargetGiveZeroDivergence) {
  const fs::path cfg = WriteConfig("run.cfg", kSmall);
  const std::string base = "--config " + cfg.string() + " --out " + (dir_ / "o").string();
  ASSERT_EQ(Run(base + " gen-data"), 0);
  fs::copy_file(dir_ / "o/data/seed0/train.csv", dir_ / "o/data/seed0/test.csv",
                fs::copy_options::overwrite_existing);
  ASSERT_EQ(Run(base + " train"), 0);
  ASSERT_EQ(Run(base + " report"), 0);
  const auto rows = ReadReportCsv(dir_ / "o/report.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LE(rows[0].report.d_theta, 1e-9);
  EXPECT_EQ(rows[0].report.train_err, rows[0].report.test_err);
}

TEST_F(CliTest, VerifyDefaultSuiteExitsZero) {
  ASSERT_EQ(Run("--out " + (dir_ / "v").string() + " verify"), 0);
  const auto j = nlohmann::json::parse(Slurp(dir_ / "v/verify.json"));
  EXPECT_TRUE(j.at("passed").get<bool>());
  EXPECT_EQ(j.at("worlds").size(), 100u);
  EXPECT_TRUE(j.at("worlds")[0].contains("class_size"));
}

TEST_F(CliTest, CorruptWorldFileFailsVerifyAndNamesTheta) {
  // f_h = x0 and x1 on the aligned block; not a dictator.
  const Domain d(std::vector<int>(4, 2));
  const World w(d,
                LabelingFn::Tabulate(d, [](const FeatureVector& x) { return x[0] * x[1]; }),
                LabelingFn::Tabulate(d, [](const FeatureVector& x) { return x[2]; }),
                {0, 1}, {2, 3});
  WriteWorld(w, dir_ / "bad_world.txt");
  const fs::path cfg = WriteConfig("verify.cfg", "data.world_file = bad_world.txt\n");
  EXPECT_NE(Run("--config " + cfg.string() + " --out " + (dir_ / "v").string() +
                " verify"), 0);
  const std::string json = Slurp(dir_ / "v/verify.json");
  EXPECT_NE(json.find("theta_table"), std::string::npos);
  EXPECT_FALSE(nlohmann::json::parse(json).at("passed").get<bool>());
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Run("--config " + (dir_ / "missing.cfg").string() + " gen-data"), 3);
  const fs::path bad = WriteConfig("bad.cfg", "data.colour = red\n");
  EXPECT_EQ(Run("--config " + bad.string() + " gen-data"), 1);
  EXPECT_EQ(Run("frobnicate"), 1);
  const fs::path cfg = WriteConfig("run.cfg", kSmall);
  EXPECT_EQ(Run("--config " + cfg.string() + " --out " + (dir_ / "e").string() +
                " train"), 3);
  const fs::path exact =
      WriteConfig("exact.cfg", std::string(kSmall) + "bounds.estimator = exact\n");
  ASSERT_EQ(Run("--config " + exact.string() + " --out " + (dir_ / "x").string() +
                " gen-data"), 0);
  EXPECT_EQ(Run("--config " + exact.string() + " --out " + (dir_ / "x").string() +
                " report"), 1);
}

TEST_F(CliTest, ErmOnSyntheticDefaultsUnderAMinute) {
  const fs::path cfg = WriteConfig("run.cfg", "train.method = erm\n");
  const std::string base = "--config " + cfg.string() + " --out " + (dir_ / "o").string();
  ASSERT_EQ(Run(base + " gen-data"), 0);
  const auto start = std::chrono::steady_clock::now();
  ASSERT_EQ(Run(base + " train"), 0);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(seconds, 60.0);
}

}  // namespace
}  // namespace harm
