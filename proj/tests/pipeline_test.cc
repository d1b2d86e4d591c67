// Copyright 2026 The dpcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpcert/pipeline.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "dpcert/config.h"
#include "dpcert/csv.h"
#include "dpcert/dataset_io.h"
#include "json.hpp"

namespace dpcert {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dpcert_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = dir_ / "tiny.json";
    std::ofstream(config_) << R"({
      "data": {"M": 40},
      "train": {"p": 4, "T": 60, "target_refresh": 20},
      "certify": {"rollouts_per_instance": 5, "episodes": 2,
                  "r_range": [0, 1, 2, 5]},
      "attack": [{"kind": "adversarial_reward", "budget": 1, "seed": 3},
                 {"kind": "transition_flip", "budget": 2, "seed": 4,
                  "selection": "uniform", "mode": "reward"}],
      "soundness": {"trials": 2, "p": 3, "rollouts_per_instance": 5},
      "output": "unused"
    })";
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Exit status of the CLI; stderr goes to dir_/stderr.txt.
  int Run(const std::string& stage, const std::string& extra = "",
          const fs::path& out = {}) {
    const fs::path target = out.empty() ? dir_ / "out" : out;
    const std::string cmd = std::string(DPCERT_CLI) + " " + stage +
                            " --config " + config_.string() + " --out " +
                            target.string() + " " + extra + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  nlohmann::json ErrorLine() {
    return nlohmann::json::parse(Slurp(dir_ / "stderr.txt"));
  }

  fs::path dir_;
  fs::path config_;
};

TEST_F(CliTest, ConfigErrorsExitTwo) {
  EXPECT_EQ(Run("bogus-stage"), 2);
  EXPECT_EQ(ErrorLine()["error"], "config");
  EXPECT_EQ(ErrorLine()["exit_code"], 2);
  EXPECT_EQ(Run("gen-data", "--train.nope=1"), 2);
  EXPECT_EQ(Run("gen-data", "--seed abc"), 2);
  std::ofstream(config_) << R"({"train": {"sigma": -1}})";
  EXPECT_EQ(Run("gen-data"), 2);
}

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(Run("--help"), 0);
  EXPECT_NE(Slurp(dir_ / "stdout.txt").find("gen-data"), std::string::npos);
}

TEST_F(CliTest, MissingInputExitsThree) {
  EXPECT_EQ(Run("train"), 3);
  EXPECT_EQ(ErrorLine()["error"], "input");
  EXPECT_EQ(Run("report"), 3);
}

TEST_F(CliTest, HashMismatchExitsThree) {
  ASSERT_EQ(Run("gen-data"), 0);
  EXPECT_EQ(Run("train", "--train.sigma=3.0"), 3);
  EXPECT_NE(ErrorLine()["message"].get<std::string>().find("config"),
            std::string::npos);
}

TEST_F(CliTest, TamperedCertificateExitsFour) {
  ASSERT_EQ(Run("gen-data"), 0);
  ASSERT_EQ(Run("train"), 0);
  ASSERT_EQ(Run("certify-policy"), 0);
  const fs::path csv = dir_ / "out" / "policy_cert.csv";
  CsvTable table = ParseCsv(Slurp(csv));
  const int jc = table.Column("J_certified");
  table.rows.back()[jc] = "1e9";
  std::ostringstream os;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    os << (i ? "," : "") << table.header[i];
  }
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
  std::ofstream(csv) << os.str();
  EXPECT_EQ(Run("report"), 4);
  EXPECT_EQ(ErrorLine()["error"], "numeric");
}

TEST_F(CliTest, SingleTrajectoryDataset) {
  ASSERT_EQ(Run("gen-data", "--data.M=1"), 0);
  Dataset d = LoadDataset(dir_ / "out" / "dataset.jsonl");
  EXPECT_EQ(d.num_trajectories(), 1);
}

TEST_F(CliTest, FullPipeline) {
  for (const char* stage : {"gen-data", "train", "certify-policy",
                            "certify-action", "attack", "eval-soundness",
                            "report"}) {
    ASSERT_EQ(Run(stage), 0) << stage << ": " << Slurp(dir_ / "stderr.txt");
  }
  const ArtifactPaths paths{dir_ / "out"};
  for (const fs::path& p :
       {paths.dataset(), paths.policy_cert(), paths.action_radii(),
        paths.stability(), paths.soundness(), paths.policy_svg(),
        paths.stability_svg(), paths.report(), paths.provenance(),
        paths.attacked(0), paths.attacked(1)}) {
    EXPECT_TRUE(fs::exists(p)) << p;
  }
  EXPECT_EQ(Slurp(paths.policy_svg()).rfind("<svg", 0), 0u);

  const CsvTable policy = ParseCsv(Slurp(paths.policy_cert()));
  for (const auto& row : policy.rows) {
    if (row[policy.Column("r")] == "0") {
      EXPECT_EQ(row[policy.Column("J_certified")],
                row[policy.Column("J_lower_clean")]);
    }
  }

  const auto report = nlohmann::json::parse(Slurp(paths.report()));
  const ExperimentConfig config = LoadConfig(config_);
  EXPECT_EQ(report["provenance"]["config_hash"], config.hash);
  EXPECT_TRUE(report["provenance"].contains("tool_version"));
  EXPECT_EQ(report["confidence"]["delta_conf"], 0.001);
  EXPECT_EQ(report["policy_curve"].size(), policy.rows.size());
  EXPECT_TRUE(report.contains("stability"));
  EXPECT_TRUE(report.contains("soundness"));

  const auto provenance = nlohmann::json::parse(Slurp(paths.provenance()));
  EXPECT_EQ(provenance["config_hash"], config.hash);
  EXPECT_TRUE(provenance["stages"].contains("report"));

  // The attacked datasets sit at the configured distances.
  const Dataset clean = LoadDataset(paths.dataset());
  EXPECT_EQ(DatasetDistance(clean, LoadDataset(paths.attacked(0)),
                            PrivacyLevel::kTrajectory),
            1);
  EXPECT_EQ(DatasetDistance(clean, LoadDataset(paths.attacked(1)),
                            PrivacyLevel::kTransition),
            2);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  const fs::path a = dir_ / "a", b = dir_ / "b";
  for (const fs::path& out : {a, b}) {
    for (const char* stage :
         {"gen-data", "train", "certify-policy", "certify-action", "report"}) {
      ASSERT_EQ(Run(stage, "", out), 0) << stage;
    }
  }
  for (const char* name : {"dataset.jsonl", "policy_cert.csv",
                           "action_radii.csv", "stability.csv",
                           "policy_curve.svg", "stability.svg", "report.json",
                           "provenance.json"}) {
    EXPECT_EQ(Slurp(a / name), Slurp(b / name)) << name;
  }
}

TEST_F(CliTest, SeedChangesData) {
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(Run("gen-data", "--seed 1", a), 0);
  ASSERT_EQ(Run("gen-data", "--seed 2", b), 0);
  EXPECT_NE(Slurp(a / "dataset.jsonl"), Slurp(b / "dataset.jsonl"));
}

TEST(StabilityTableTest, PerKindRatios) {
  std::vector<RadiusRecord> records;
  for (int r : {0, 2, 4, 8}) {
    records.push_back({.radius = r, .kind = GuaranteeKind::kRdp});
    records.push_back({.radius = r / 2, .kind = GuaranteeKind::kAdp});
  }
  const auto rows = StabilityTable(records, {0, 2, 4});
  ASSERT_EQ(rows.size(), 6u);
  std::map<std::pair<GuaranteeKind, int>, double> by;
  for (const auto& row : rows) by[{row.kind, row.threshold}] = row.ratio;
  EXPECT_DOUBLE_EQ((by[{GuaranteeKind::kRdp, 0}]), 1.0);
  EXPECT_DOUBLE_EQ((by[{GuaranteeKind::kRdp, 4}]), 0.5);
  EXPECT_DOUBLE_EQ((by[{GuaranteeKind::kAdp, 2}]), 0.5);
  EXPECT_DOUBLE_EQ((by[{GuaranteeKind::kAdp, 4}]), 0.25);
  EXPECT_EQ(StabilityCsv(rows).substr(0, 21), "threshold,ratio,kind\n");
}

TEST(GoldenTest, FamilyMonotoneOnDesk) {
  TrainingMeta meta;
  meta.sample_rate = 0.002;
  meta.noise_multiplier = 2.0;
  meta.iterations = 2000;
  EXPECT_NO_THROW(
      CheckFamilyMonotone(meta, {1, 2, 3, 5, 10, 50, 200}, DefaultDeltaGrid()));
  const std::string csv = GoldenAccountantCsv(meta, {1, 2}, DefaultDeltaGrid());
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "level,q,sigma,T,r,kind,alpha,eps,delta");
}

}  // namespace
}  // namespace dpcert
