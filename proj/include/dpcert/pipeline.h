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

// Pipeline stages behind the CLI subcommands. Every stage reads and writes
// artifacts under one output directory and records the config hash in
// provenance.json; later stages refuse artifacts from a different config.

#ifndef DPCERT_PIPELINE_H_
#define DPCERT_PIPELINE_H_

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "dpcert/accountant.h"
#include "dpcert/config.h"
#include "dpcert/train.h"

namespace dpcert {

// Artifact locations under an output directory.
struct ArtifactPaths {
  std::filesystem::path root;

  std::filesystem::path dataset() const { return root / "dataset.jsonl"; }
  std::filesystem::path ensemble() const { return root / "ensemble"; }
  std::filesystem::path policy_cert() const { return root / "policy_cert.csv"; }
  std::filesystem::path action_radii() const {
    return root / "action_radii.csv";
  }
  std::filesystem::path stability() const { return root / "stability.csv"; }
  std::filesystem::path attacks() const { return root / "attacks"; }
  std::filesystem::path soundness() const { return root / "soundness.csv"; }
  std::filesystem::path policy_svg() const { return root / "policy_curve.svg"; }
  std::filesystem::path stability_svg() const {
    return root / "stability.svg";
  }
  std::filesystem::path report() const { return root / "report.json"; }
  std::filesystem::path provenance() const { return root / "provenance.json"; }
  std::filesystem::path golden() const {
    return root / "accountant_golden.csv";
  }
  std::filesystem::path attacked(std::size_t index) const;
};

const std::vector<std::string>& StageNames();

// Runs one stage. Throws the Error subclass matching the exit code.
void RunStage(const std::string& stage, const ExperimentConfig& config,
              const std::filesystem::path& out, std::ostream& log);

void GenDataStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                  std::ostream& log);
void TrainStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                std::ostream& log);
void CertifyPolicyStage(const ExperimentConfig& config,
                        const ArtifactPaths& paths, std::ostream& log);
void CertifyActionStage(const ExperimentConfig& config,
                        const ArtifactPaths& paths, std::ostream& log);
void AttackStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                 std::ostream& log);
void EvalSoundnessStage(const ExperimentConfig& config,
                        const ArtifactPaths& paths, std::ostream& log);
void ReportStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                 std::ostream& log);
void GoldenAccountantStage(const ExperimentConfig& config,
                           const ArtifactPaths& paths, std::ostream& log);

// Stability table (threshold,ratio,kind) from per-step radii.
struct StabilityRow {
  int threshold = 0;
  double ratio = 0.0;
  GuaranteeKind kind = GuaranteeKind::kRdp;
};
std::vector<StabilityRow> StabilityTable(
    const std::vector<RadiusRecord>& records,
    const std::vector<int>& thresholds);
std::string StabilityCsv(const std::vector<StabilityRow>& rows);

// Golden accountant table: every family member for each radius and kind.
// Columns level,q,sigma,T,r,kind,alpha,eps,delta; the unused parameter of
// a member is left empty. Radius 0 is skipped.
std::string GoldenAccountantCsv(const TrainingMeta& meta,
                                const std::vector<int>& radii,
                                const std::vector<double>& delta_grid);

// Training meta for `config` with q resolved against the config's own
// generated dataset.
TrainingMeta ResolvedMeta(const ExperimentConfig& config);

// Throws NumericError unless the family's minimum epsilon is
// non-decreasing over the sorted radii, for both kinds.
void CheckFamilyMonotone(const TrainingMeta& meta,
                         const std::vector<int>& radii,
                         const std::vector<double>& delta_grid);

// One retrain trial of eval-soundness.
struct SoundnessTrial {
  std::string attack;
  int budget = 0;
  int radius = 0;
  int trial = 0;
  double empirical = 0.0;
  double certified_adp = 0.0;
  double certified_rdp = 0.0;
  bool passed = false;
};
std::string SoundnessCsv(const std::vector<SoundnessTrial>& trials);

// Retrains on every configured attack `trials` times and compares the
// attacked ensemble's mean return with the clean certificate at the
// measured poisoning radius. Does not throw on violations.
std::vector<SoundnessTrial> EvaluateSoundness(const ExperimentConfig& config,
                                              const Dataset& clean,
                                              const PolicyEnsemble& ensemble,
                                              std::ostream& log);

}  // namespace dpcert

#endif  // DPCERT_PIPELINE_H_
