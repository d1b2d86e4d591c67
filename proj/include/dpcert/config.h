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

// Experiment configuration: one JSON document, defaults for every key,
// dotted-path overrides and a stable content hash.

#ifndef DPCERT_CONFIG_H_
#define DPCERT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpcert/attacks.h"
#include "dpcert/cert_action.h"
#include "dpcert/cert_policy.h"
#include "dpcert/mdp.h"
#include "dpcert/train.h"
#include "json.hpp"

namespace dpcert {

struct DataConfig {
  int num_trajectories = 2000;
  BehaviorSpec behavior;
  std::uint64_t seed = 1;
};

// Sampling rate is either given directly (q > 0) or derived from an
// expected batch size: batch / N for SGM and batch / M for DP-FedAvg.
struct TrainBlock {
  PrivacyLevel level = PrivacyLevel::kTransition;
  int p = 50;
  std::uint64_t seed = 7;
  int threads = 1;
  double q = 0.0;
  int expected_batch = 32;
  SgmConfig sgm;
  FedAvgConfig fedavg;

  // The trainer config with q resolved against `dataset`.
  TrainerConfig Resolve(const Dataset& dataset) const;
};

struct CertifyBlock {
  double delta_conf = 0.001;
  double alpha_conf = 0.001;
  std::vector<double> delta_grid = DefaultDeltaGrid();
  std::vector<int> r_range = {0, 1, 2, 5, 10, 20, 50, 100, 200};
  int r_max = 512;
  int rollouts_per_instance = 10;
  int episodes = 5;
  std::vector<int> stability_thresholds = {0, 1,  2,  3,  4,   5,
                                           10, 20, 50, 100, 200, 512};
  std::uint64_t seed = 11;
};

struct SoundnessBlock {
  int trials = 20;
  int p = 20;
  int rollouts_per_instance = 10;
};

struct ExperimentConfig {
  GridWorldConfig env;
  DataConfig data;
  TrainBlock train;
  CertifyBlock certify;
  std::vector<AttackSpec> attacks;
  SoundnessBlock soundness;
  std::filesystem::path output = "out";

  // FNV-1a over the canonical JSON with the output path removed.
  std::string hash;
  nlohmann::json source;
};

// Every recognised key with its default value.
nlohmann::json DefaultConfigJson();

// Merges `document` over the defaults, applies `overrides` (dotted path,
// JSON or bare-string value) and `seed` (replaces every seed), then
// validates. Unknown keys and bad values throw ConfigError.
ExperimentConfig BuildConfig(
    const nlohmann::json& document,
    const std::vector<std::pair<std::string, std::string>>& overrides = {},
    std::optional<std::uint64_t> seed = std::nullopt);

ExperimentConfig LoadConfig(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& overrides = {},
    std::optional<std::uint64_t> seed = std::nullopt);

std::string Fnv1aHex(const std::string& bytes);

}  // namespace dpcert

#endif  // DPCERT_CONFIG_H_
