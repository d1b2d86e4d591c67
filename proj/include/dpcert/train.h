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

// Differentially-private offline training of linear Q policies:
// per-transition SGM and per-trajectory DP-FedAvg, and ensembles of
// independently trained instances.

#ifndef DPCERT_TRAIN_H_
#define DPCERT_TRAIN_H_

#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "dpcert/linear_q.h"
#include "dpcert/mdp.h"
#include "dpcert/rng.h"

namespace dpcert {

// Which neighbouring-dataset relation the trainer's guarantee refers to.
enum class PrivacyLevel { kTransition, kTrajectory };

std::string ToString(PrivacyLevel level);
PrivacyLevel PrivacyLevelFromString(const std::string& s);

struct ModelShape {
  FeatureMap features;
  int num_actions = kNumGridActions;
};

struct SgmConfig {
  double sample_rate = 0.01;     // q
  double noise_multiplier = 2;   // sigma
  double clip_norm = 1.0;        // C
  int iterations = 2000;         // T
  double learning_rate = 0.1;    // eta
  double gamma = 0.95;
  int target_refresh = 100;

  void Validate() const;
};

struct FedAvgConfig {
  double sample_rate = 0.1;
  double noise_multiplier = 2;
  // +inf disables delta clipping (plain federated averaging when sigma = 0).
  double clip_norm = 1.0;
  int local_epochs = 1;
  int batch_size = 32;
  double learning_rate = 0.1;
  int iterations = 2000;
  double gamma = 0.95;
  int target_refresh = 100;
  // Must equal the dataset's trajectory count.
  int trajectory_count = 0;

  void Validate() const;
};

using TrainerConfig = std::variant<SgmConfig, FedAvgConfig>;

// Poisson-samples transitions with probability q per iteration, sums
// clipped per-transition TD gradients, adds N(0, (sigma C)^2) per
// coordinate, divides by the expected batch size q N and steps with eta.
// The bootstrap target is a frozen copy refreshed every target_refresh
// iterations. Weights start at zero.
LinearQ SgmTrain(const Dataset& dataset, const ModelShape& shape,
                 const SgmConfig& config, Rng& rng);

// Poisson-samples trajectories with probability q; each runs E local epochs
// of consecutive size-B mini-batch steps from the current model, with the
// accumulated delta re-clipped to norm C after every step. Clipped deltas
// are summed, divided by q K, noised with N(0, (sigma C / (q K))^2) and
// applied.
LinearQ DpFedAvgTrain(const Dataset& dataset, const ModelShape& shape,
                      const FedAvgConfig& config, Rng& rng);

// Everything the privacy accountant and the persisted manifest need.
struct TrainingMeta {
  PrivacyLevel level = PrivacyLevel::kTransition;
  double sample_rate = 0.0;
  double noise_multiplier = 0.0;
  int iterations = 0;
  double clip_norm = 0.0;
  double learning_rate = 0.0;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::string env;
  std::string feature_map;

  friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

TrainingMeta MetaFor(const TrainerConfig& config);

struct PolicyEnsemble {
  std::vector<LinearQ> instances;
  TrainingMeta meta;

  int size() const { return static_cast<int>(instances.size()); }
  int num_actions() const { return instances.front().num_actions(); }
};

// Trains p instances, instance i on the stream DeriveSeed(master_seed, i).
// Instances run on up to `threads` worker threads; the result does not
// depend on the thread count.
PolicyEnsemble TrainEnsemble(const Dataset& dataset, const ModelShape& shape,
                             const TrainerConfig& config, int p,
                             std::uint64_t master_seed, int threads = 1);

}  // namespace dpcert

#endif  // DPCERT_TRAIN_H_
