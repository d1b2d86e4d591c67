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

#include "dpcert/ensemble_io.h"

#include "dpcert/dataset_io.h"
#include "dpcert/errors.h"
#include "json.hpp"

namespace dpcert {
namespace {

using Json = nlohmann::ordered_json;

std::filesystem::path InstancePath(const std::filesystem::path& dir, int i) {
  return dir / ("instance_" + std::to_string(i) + ".json");
}

}  // namespace

void SaveEnsemble(const PolicyEnsemble& ensemble,
                  const std::filesystem::path& dir,
                  const std::string& config_hash) {
  if (ensemble.instances.empty()) throw InputError("ensemble is empty");
  std::filesystem::create_directories(dir);
  const TrainingMeta& meta = ensemble.meta;
  const LinearQ& first = ensemble.instances.front();

  Json manifest;
  manifest["p"] = ensemble.size();
  manifest["level"] = ToString(meta.level);
  manifest["q"] = meta.sample_rate;
  manifest["sigma"] = meta.noise_multiplier;
  manifest["T"] = meta.iterations;
  manifest["C"] = meta.clip_norm;
  manifest["eta"] = meta.learning_rate;
  manifest["seeds"] = meta.seeds;
  manifest["env"] = meta.env;
  manifest["feature_map"] = first.features().Id();
  manifest["feature_dim"] = first.features().dim;
  manifest["num_actions"] = first.num_actions();
  manifest["master_seed"] = meta.master_seed;
  manifest["config_hash"] = config_hash;
  WriteFileAtomic(dir / "manifest.json", manifest.dump(2) + "\n");

  for (int i = 0; i < ensemble.size(); ++i) {
    const Eigen::VectorXd& w = ensemble.instances[i].weights();
    Json weights = Json::array();
    for (Eigen::Index k = 0; k < w.size(); ++k) weights.push_back(w(k));
    WriteFileAtomic(InstancePath(dir, i), weights.dump() + "\n");
  }
}

PolicyEnsemble LoadEnsemble(const std::filesystem::path& dir,
                            std::string* config_hash) {
  PolicyEnsemble ensemble;
  try {
    const Json manifest = Json::parse(ReadFile(dir / "manifest.json"));
    TrainingMeta& meta = ensemble.meta;
    const int p = manifest.at("p").get<int>();
    meta.level = PrivacyLevelFromString(manifest.at("level").get<std::string>());
    meta.sample_rate = manifest.at("q").get<double>();
    meta.noise_multiplier = manifest.at("sigma").get<double>();
    meta.iterations = manifest.at("T").get<int>();
    meta.clip_norm = manifest.at("C").get<double>();
    meta.learning_rate = manifest.at("eta").get<double>();
    meta.seeds = manifest.at("seeds").get<std::vector<std::uint64_t>>();
    meta.env = manifest.at("env").get<std::string>();
    meta.feature_map = manifest.at("feature_map").get<std::string>();
    meta.master_seed = manifest.value("master_seed", std::uint64_t{0});
    if (config_hash != nullptr) {
      *config_hash = manifest.value("config_hash", std::string());
    }
    const FeatureMap features = FeatureMap::FromId(
        meta.feature_map, manifest.at("feature_dim").get<int>());
    const int num_actions = manifest.at("num_actions").get<int>();
    if (p < 1) throw InputError("manifest p must be >= 1");
    for (int i = 0; i < p; ++i) {
      const auto w =
          Json::parse(ReadFile(InstancePath(dir, i))).get<std::vector<double>>();
      ensemble.instances.emplace_back(
          features, num_actions,
          Eigen::Map<const Eigen::VectorXd>(w.data(), w.size()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed ensemble in " + dir.string() + ": " + e.what());
  }
  return ensemble;
}

}  // namespace dpcert
