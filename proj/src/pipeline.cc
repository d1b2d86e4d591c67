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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "dpcert/attacks.h"
#include "dpcert/cert_action.h"
#include "dpcert/cert_policy.h"
#include "dpcert/csv.h"
#include "dpcert/dataset_io.h"
#include "dpcert/ensemble_io.h"
#include "dpcert/errors.h"
#include "dpcert/linear_q.h"
#include "dpcert/plot.h"
#include "dpcert/rng.h"
#include "json.hpp"

#ifndef DPCERT_VERSION
#define DPCERT_VERSION "0.0.0"
#endif

namespace dpcert {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// Stream indices that keep every consumer of a master seed apart.
constexpr std::uint64_t kEpisodeStream = 1u << 20;
constexpr std::uint64_t kSoundnessStream = 1u << 21;

ModelShape ShapeFor(const GridWorldConfig& env) {
  return ModelShape{FeatureMap::OneHot(env.num_states()), kNumGridActions};
}

Json ReadJson(const fs::path& path) {
  try {
    return Json::parse(ReadFile(path));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string RecordedHash(const ArtifactPaths& paths) {
  if (!fs::exists(paths.provenance())) return "";
  return ReadJson(paths.provenance()).value("config_hash", std::string());
}

void CheckProvenance(const ExperimentConfig& config,
                     const ArtifactPaths& paths) {
  const std::string recorded = RecordedHash(paths);
  if (!recorded.empty() && recorded != config.hash) {
    throw InputError("artifacts in " + paths.root.string() +
                     " were produced by config " + recorded + ", not " +
                     config.hash);
  }
}

void RequireStage(const ArtifactPaths& paths, const std::string& stage) {
  if (!fs::exists(paths.provenance()) ||
      !ReadJson(paths.provenance())["stages"].contains(stage)) {
    throw InputError("missing input: run '" + stage + "' first in " +
                     paths.root.string());
  }
}

void RecordStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                 const std::string& stage,
                 const std::vector<fs::path>& outputs, bool fresh = false) {
  Json doc;
  if (!fresh && fs::exists(paths.provenance())) doc = ReadJson(paths.provenance());
  doc["config_hash"] = config.hash;
  doc["tool_version"] = DPCERT_VERSION;
  doc["seeds"] = {{"data", config.data.seed},
                  {"train", config.train.seed},
                  {"certify", config.certify.seed}};
  Json files = Json::array();
  for (const fs::path& p : outputs) {
    files.push_back(fs::relative(p, paths.root).generic_string());
  }
  doc["stages"][stage] = files;
  WriteFileAtomic(paths.provenance(), doc.dump(2) + "\n");
}

Dataset LoadCheckedDataset(const fs::path& path,
                           const ExperimentConfig& config) {
  if (!fs::exists(path)) throw InputError("missing input: " + path.string());
  Dataset dataset = LoadDataset(path);
  if (dataset.meta().config_hash != config.hash) {
    throw InputError(path.string() + " was produced by config '" +
                     dataset.meta().config_hash + "', not " + config.hash);
  }
  return dataset;
}

PolicyEnsemble LoadCheckedEnsemble(const ArtifactPaths& paths,
                                   const ExperimentConfig& config) {
  if (!fs::exists(paths.ensemble() / "manifest.json")) {
    throw InputError("missing input: " + paths.ensemble().string());
  }
  std::string hash;
  PolicyEnsemble ensemble = LoadEnsemble(paths.ensemble(), &hash);
  if (hash != config.hash) {
    throw InputError("ensemble was produced by config '" + hash + "', not " +
                     config.hash);
  }
  return ensemble;
}

Dataset GenerateFor(const ExperimentConfig& config) {
  Rng rng(config.data.seed);
  Dataset dataset = GenerateDataset(config.env, config.data.behavior,
                                    config.data.num_trajectories, rng);
  dataset.mutable_meta().config_hash = config.hash;
  return dataset;
}

PolicyCertOptions PolicyOptions(const ExperimentConfig& config) {
  PolicyCertOptions options;
  options.rollouts_per_instance = config.certify.rollouts_per_instance;
  options.radii = config.certify.r_range;
  options.delta_conf = config.certify.delta_conf;
  options.delta_grid = config.certify.delta_grid;
  options.seed = config.certify.seed;
  return options;
}

ActionCertOptions ActionOptions(const ExperimentConfig& config) {
  ActionCertOptions options;
  options.alpha_conf = config.certify.alpha_conf;
  options.r_max = config.certify.r_max;
  options.delta_grid = config.certify.delta_grid;
  return options;
}

double Mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

// J_certified per kind must not increase with r.
void CheckPolicyCurve(const CsvTable& table) {
  const int rc = table.Column("r"), kc = table.Column("kind");
  const int jc = table.Column("J_certified"), lc = table.Column("J_lower_clean");
  std::map<std::string, std::vector<std::pair<int, double>>> by_kind;
  for (const auto& row : table.rows) {
    const double j = ParseReal(row[jc]);
    if (j > ParseReal(row[lc])) {
      throw NumericError("certified bound exceeds J_lower at r=" + row[rc]);
    }
    by_kind[row[kc]].emplace_back(std::stoi(row[rc]), j);
  }
  for (auto& [kind, points] : by_kind) {
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i].second > points[i - 1].second) {
        throw NumericError(kind + " policy certificate increases with r");
      }
    }
  }
}

void CheckStability(const std::vector<StabilityRow>& rows) {
  std::map<GuaranteeKind, std::vector<std::pair<int, double>>> by_kind;
  for (const StabilityRow& row : rows) {
    by_kind[row.kind].emplace_back(row.threshold, row.ratio);
  }
  for (auto& [kind, points] : by_kind) {
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (points[i].second > points[i - 1].second) {
        throw NumericError(ToString(kind) +
                           " stability ratio increases with threshold");
      }
    }
  }
}

Json TableJson(const CsvTable& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json obj;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      obj[table.header[c]] = row[c];
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

}  // namespace

fs::path ArtifactPaths::attacked(std::size_t index) const {
  return attacks() / ("attack_" + std::to_string(index) + ".jsonl");
}

const std::vector<std::string>& StageNames() {
  static const std::vector<std::string> names = {
      "gen-data",       "train",  "certify-policy", "certify-action",
      "attack",         "eval-soundness", "report", "golden-accountant"};
  return names;
}

void RunStage(const std::string& stage, const ExperimentConfig& config,
              const fs::path& out, std::ostream& log) {
  const ArtifactPaths paths{out};
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw InputError("cannot create " + out.string() + ": " + ec.message());
  if (stage == "gen-data") return GenDataStage(config, paths, log);
  if (stage == "train") return TrainStage(config, paths, log);
  if (stage == "certify-policy") return CertifyPolicyStage(config, paths, log);
  if (stage == "certify-action") return CertifyActionStage(config, paths, log);
  if (stage == "attack") return AttackStage(config, paths, log);
  if (stage == "eval-soundness") return EvalSoundnessStage(config, paths, log);
  if (stage == "report") return ReportStage(config, paths, log);
  if (stage == "golden-accountant") {
    return GoldenAccountantStage(config, paths, log);
  }
  throw ConfigError("unknown subcommand '" + stage + "'");
}

void GenDataStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                  std::ostream& log) {
  const Dataset dataset = GenerateFor(config);
  SaveDataset(dataset, paths.dataset());
  RecordStage(config, paths, "gen-data", {paths.dataset()}, /*fresh=*/true);
  log << "gen-data: M=" << dataset.num_trajectories()
      << " N=" << dataset.num_transitions() << " -> "
      << paths.dataset().string() << "\n";
}

void TrainStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                std::ostream& log) {
  CheckProvenance(config, paths);
  const Dataset dataset = LoadCheckedDataset(paths.dataset(), config);
  const TrainerConfig trainer = config.train.Resolve(dataset);
  const PolicyEnsemble ensemble =
      TrainEnsemble(dataset, ShapeFor(config.env), trainer, config.train.p,
                    config.train.seed, config.train.threads);
  SaveEnsemble(ensemble, paths.ensemble(), config.hash);
  RecordStage(config, paths, "train", {paths.ensemble()});
  log << "train: p=" << ensemble.size()
      << " level=" << ToString(ensemble.meta.level)
      << " q=" << FormatReal(ensemble.meta.sample_rate)
      << " sigma=" << FormatReal(ensemble.meta.noise_multiplier)
      << " T=" << ensemble.meta.iterations << "\n";
}

void CertifyPolicyStage(const ExperimentConfig& config,
                        const ArtifactPaths& paths, std::ostream& log) {
  CheckProvenance(config, paths);
  const PolicyEnsemble ensemble = LoadCheckedEnsemble(paths, config);
  const std::vector<PolicyCertRow> rows =
      PolicyCertCurve(ensemble, config.env, PolicyOptions(config));
  CheckFamilyMonotone(ensemble.meta, config.certify.r_range,
                      config.certify.delta_grid);
  const std::string csv = PolicyCertCsv(rows);
  CheckPolicyCurve(ParseCsv(csv));
  WriteFileAtomic(paths.policy_cert(), csv);
  RecordStage(config, paths, "certify-policy", {paths.policy_cert()});
  log << "certify-policy: J_lower=" << FormatReal(rows.front().j_lower_clean)
      << " m=" << rows.front().m << " -> " << paths.policy_cert().string()
      << "\n";
}

void CertifyActionStage(const ExperimentConfig& config,
                        const ArtifactPaths& paths, std::ostream& log) {
  CheckProvenance(config, paths);
  const PolicyEnsemble ensemble = LoadCheckedEnsemble(paths, config);
  const ActionCertOptions options = ActionOptions(config);
  std::vector<RadiusRecord> records;
  for (int e = 0; e < config.certify.episodes; ++e) {
    Rng rng = MakeStream(config.certify.seed, kEpisodeStream + e);
    const std::vector<RadiusRecord> episode =
        CertifyEpisode(ensemble, config.env, rng, options, e);
    records.insert(records.end(), episode.begin(), episode.end());
  }
  const std::vector<StabilityRow> stability =
      StabilityTable(records, config.certify.stability_thresholds);
  CheckStability(stability);
  WriteFileAtomic(paths.action_radii(), RadiusCsv(records, options));
  WriteFileAtomic(paths.stability(), StabilityCsv(stability));
  RecordStage(config, paths, "certify-action",
              {paths.action_radii(), paths.stability()});
  log << "certify-action: " << records.size() / 2 << " steps over "
      << config.certify.episodes << " episodes -> "
      << paths.action_radii().string() << "\n";
}

void AttackStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                 std::ostream& log) {
  CheckProvenance(config, paths);
  const Dataset clean = LoadCheckedDataset(paths.dataset(), config);
  std::vector<fs::path> outputs;
  for (std::size_t i = 0; i < config.attacks.size(); ++i) {
    const AttackSpec& spec = config.attacks[i];
    const Dataset attacked = ApplyAttack(clean, spec);
    SaveDataset(attacked, paths.attacked(i));
    outputs.push_back(paths.attacked(i));
    log << "attack: " << ToString(spec.kind) << " budget=" << spec.budget
        << " transitions changed="
        << DatasetDistance(clean, attacked, PrivacyLevel::kTransition)
        << " -> " << paths.attacked(i).string() << "\n";
  }
  RecordStage(config, paths, "attack", outputs);
}

std::vector<SoundnessTrial> EvaluateSoundness(const ExperimentConfig& config,
                                              const Dataset& clean,
                                              const PolicyEnsemble& ensemble,
                                              std::ostream& log) {
  const auto [a, b] = config.env.CumulativeRewardBounds();
  const std::vector<double> clean_returns =
      CollectReturns(ensemble, config.env,
                     config.certify.rollouts_per_instance, config.certify.seed);
  const ModelShape shape = ShapeFor(config.env);
  std::vector<SoundnessTrial> trials;
  for (std::size_t i = 0; i < config.attacks.size(); ++i) {
    const AttackSpec& spec = config.attacks[i];
    const Dataset attacked = ApplyAttack(clean, spec);
    const int radius = DatasetDistance(clean, attacked, ensemble.meta.level);
    PolicyCertOptions options = PolicyOptions(config);
    options.radii = {radius};
    double cert_adp = a, cert_rdp = a;
    for (const PolicyCertRow& row :
         PolicyCertFromReturns(clean_returns, a, b, ensemble.meta, options)) {
      (row.kind == "adp" ? cert_adp : cert_rdp) = row.j_certified;
    }
    const TrainerConfig trainer = config.train.Resolve(attacked);
    for (int k = 0; k < config.soundness.trials; ++k) {
      const std::uint64_t stream = kSoundnessStream + i * 4096 + k;
      const PolicyEnsemble poisoned = TrainEnsemble(
          attacked, shape, trainer, config.soundness.p,
          DeriveSeed(config.train.seed, stream), config.train.threads);
      const std::vector<double> returns = CollectReturns(
          poisoned, config.env, config.soundness.rollouts_per_instance,
          DeriveSeed(config.certify.seed, stream));
      SoundnessTrial trial{.attack = ToString(spec.kind),
                           .budget = spec.budget,
                           .radius = radius,
                           .trial = k,
                           .empirical = Mean(returns),
                           .certified_adp = cert_adp,
                           .certified_rdp = cert_rdp};
      trial.passed = trial.empirical >= std::max(cert_adp, cert_rdp);
      log << "eval-soundness: " << trial.attack << " r=" << radius
          << " trial=" << k << " ECR=" << FormatReal(trial.empirical)
          << " J_r(adp)=" << FormatReal(cert_adp)
          << " J_r(rdp)=" << FormatReal(cert_rdp)
          << (trial.passed ? " ok" : " VIOLATED") << "\n";
      trials.push_back(trial);
    }
  }
  return trials;
}

std::string SoundnessCsv(const std::vector<SoundnessTrial>& trials) {
  std::ostringstream os;
  os << "attack,budget,r,trial,ecr,J_certified_adp,J_certified_rdp,passed\n";
  for (const SoundnessTrial& t : trials) {
    os << t.attack << ',' << t.budget << ',' << t.radius << ',' << t.trial
       << ',' << FormatReal(t.empirical) << ',' << FormatReal(t.certified_adp)
       << ',' << FormatReal(t.certified_rdp) << ',' << (t.passed ? 1 : 0)
       << '\n';
  }
  return os.str();
}

void EvalSoundnessStage(const ExperimentConfig& config,
                        const ArtifactPaths& paths, std::ostream& log) {
  CheckProvenance(config, paths);
  const Dataset clean = LoadCheckedDataset(paths.dataset(), config);
  const PolicyEnsemble ensemble = LoadCheckedEnsemble(paths, config);
  const std::vector<SoundnessTrial> trials =
      EvaluateSoundness(config, clean, ensemble, log);
  WriteFileAtomic(paths.soundness(), SoundnessCsv(trials));
  RecordStage(config, paths, "eval-soundness", {paths.soundness()});
  const auto failed = std::count_if(trials.begin(), trials.end(),
                                    [](const auto& t) { return !t.passed; });
  if (failed > 0) {
    throw AssertionFailure(std::to_string(failed) + " of " +
                           std::to_string(trials.size()) +
                           " trials fell below the certified bound");
  }
}

void ReportStage(const ExperimentConfig& config, const ArtifactPaths& paths,
                 std::ostream& log) {
  CheckProvenance(config, paths);
  RequireStage(paths, "certify-policy");
  const std::string policy_csv = ReadFile(paths.policy_cert());
  const CsvTable policy = ParseCsv(policy_csv);
  CheckPolicyCurve(policy);
  WriteFileAtomic(paths.policy_svg(),
                  EmitPlot(policy_csv, PlotKind::kPolicyCurve));
  std::vector<fs::path> outputs = {paths.policy_svg()};

  const Json provenance = ReadJson(paths.provenance());
  Json report;
  report["provenance"] = {{"config_hash", config.hash},
                          {"tool_version", DPCERT_VERSION},
                          {"seeds", provenance["seeds"]}};
  report["confidence"] = {{"delta_conf", config.certify.delta_conf},
                          {"alpha_conf", config.certify.alpha_conf},
                          {"dp_delta_grid", config.certify.delta_grid}};
  report["policy_curve"] = TableJson(policy);
  if (provenance["stages"].contains("certify-action")) {
    const std::string stability_csv = ReadFile(paths.stability());
    const CsvTable stability = ParseCsv(stability_csv);
    std::vector<StabilityRow> rows;
    for (const auto& row : stability.rows) {
      rows.push_back({std::stoi(row[stability.Column("threshold")]),
                      ParseReal(row[stability.Column("ratio")]),
                      GuaranteeKindFromString(row[stability.Column("kind")])});
    }
    CheckStability(rows);
    WriteFileAtomic(paths.stability_svg(),
                    EmitPlot(stability_csv, PlotKind::kStability));
    outputs.push_back(paths.stability_svg());
    report["stability"] = TableJson(stability);
  }
  if (provenance["stages"].contains("eval-soundness")) {
    report["soundness"] = TableJson(ParseCsv(ReadFile(paths.soundness())));
  }
  WriteFileAtomic(paths.report(), report.dump(2) + "\n");
  outputs.push_back(paths.report());
  RecordStage(config, paths, "report", outputs);
  log << "report: -> " << paths.report().string() << "\n";
}

TrainingMeta ResolvedMeta(const ExperimentConfig& config) {
  TrainingMeta meta = MetaFor(config.train.Resolve(GenerateFor(config)));
  meta.master_seed = config.train.seed;
  return meta;
}

std::string GoldenAccountantCsv(const TrainingMeta& meta,
                                const std::vector<int>& radii,
                                const std::vector<double>& delta_grid) {
  const RdpCurve composed = ComposedCurve(meta);
  std::ostringstream os;
  os << "level,q,sigma,T,r,kind,alpha,eps,delta\n";
  const std::string prefix = ToString(meta.level) + "," +
                             FormatReal(meta.sample_rate) + "," +
                             FormatReal(meta.noise_multiplier) + "," +
                             std::to_string(meta.iterations) + ",";
  for (int r : radii) {
    if (r == 0) continue;  // no group family at radius 0
    const KFamily rdp = FamilyAtRadius(composed, r, delta_grid, GuaranteeKind::kRdp);
    for (const RdpPoint& m : rdp.rdp) {
      os << prefix << r << ",rdp," << m.alpha << ',' << FormatReal(m.eps)
         << ",\n";
    }
    const KFamily adp = FamilyAtRadius(composed, r, delta_grid, GuaranteeKind::kAdp);
    for (const AdpPoint& m : adp.adp) {
      os << prefix << r << ",adp,," << FormatReal(m.eps) << ','
         << FormatReal(m.delta) << '\n';
    }
  }
  return os.str();
}

void GoldenAccountantStage(const ExperimentConfig& config,
                           const ArtifactPaths& paths, std::ostream& log) {
  const TrainingMeta meta = ResolvedMeta(config);
  WriteFileAtomic(paths.golden(),
                  GoldenAccountantCsv(meta, config.certify.r_range,
                                      config.certify.delta_grid));
  log << "golden-accountant: -> " << paths.golden().string() << "\n";
}

std::vector<StabilityRow> StabilityTable(
    const std::vector<RadiusRecord>& records,
    const std::vector<int>& thresholds) {
  std::vector<StabilityRow> rows;
  for (GuaranteeKind kind : {GuaranteeKind::kAdp, GuaranteeKind::kRdp}) {
    std::vector<int> radii;
    for (const RadiusRecord& r : records) {
      if (r.kind == kind) radii.push_back(r.radius);
    }
    if (radii.empty()) continue;
    for (int threshold : thresholds) {
      rows.push_back({threshold, StabilityRatio(radii, threshold), kind});
    }
  }
  return rows;
}

std::string StabilityCsv(const std::vector<StabilityRow>& rows) {
  std::ostringstream os;
  os << StabilityCsvHeader() << '\n';
  for (const StabilityRow& row : rows) {
    os << row.threshold << ',' << FormatReal(row.ratio) << ','
       << ToString(row.kind) << '\n';
  }
  return os.str();
}

void CheckFamilyMonotone(const TrainingMeta& meta,
                         const std::vector<int>& radii,
                         const std::vector<double>& delta_grid) {
  std::vector<int> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::remove(sorted.begin(), sorted.end(), 0), sorted.end());
  const RdpCurve composed = ComposedCurve(meta);
  for (GuaranteeKind kind : {GuaranteeKind::kAdp, GuaranteeKind::kRdp}) {
    double previous = -1.0;
    for (int r : sorted) {
      const double eps = FamilyAtRadius(composed, r, delta_grid, kind).MinEpsilon();
      if (eps < previous) {
        throw NumericError(ToString(kind) +
                           " family min-epsilon decreases at r=" +
                           std::to_string(r));
      }
      previous = eps;
    }
  }
}

}  // namespace dpcert
