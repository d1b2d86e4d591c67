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

// Poisoning attacks used to check certificates empirically. Every attack
// returns a new dataset inside the corresponding poisoning ball: at most r
// trajectories (trajectory level) or r transitions (transition level)
// differ from the input.

#ifndef DPCERT_ATTACKS_H_
#define DPCERT_ATTACKS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpcert/mdp.h"
#include "dpcert/rng.h"
#include "dpcert/train.h"

namespace dpcert {

enum class AttackKind { kRandomReward, kAdversarialReward, kTransitionFlip };
enum class FlipMode { kReward, kAction };
// kTargeted picks the largest absolute reward mass; kUniform samples
// uniformly without replacement.
enum class SelectionMode { kTargeted, kUniform };

std::string ToString(AttackKind kind);
AttackKind AttackKindFromString(const std::string& s);
std::string ToString(FlipMode mode);
FlipMode FlipModeFromString(const std::string& s);
std::string ToString(SelectionMode mode);
SelectionMode SelectionModeFromString(const std::string& s);

struct AttackSpec {
  AttackKind kind = AttackKind::kAdversarialReward;
  PrivacyLevel level = PrivacyLevel::kTrajectory;
  int budget = 0;
  std::uint64_t seed = 0;
  SelectionMode selection = SelectionMode::kTargeted;
  FlipMode flip_mode = FlipMode::kReward;

  // JSON object recorded under the dataset header's "attack" key.
  std::string ToJson() const;
};

// Rewards of every step in the selected trajectories replaced by i.i.d.
// Uniform[-1, 1] draws.
Dataset RandomRewardAttack(const Dataset& dataset,
                           const std::vector<int>& trajectory_indices,
                           Rng& rng);

// Rewards of the selected trajectories negated.
Dataset AdversarialRewardAttack(const Dataset& dataset,
                                const std::vector<int>& trajectory_indices);

// Selected flat transitions get reward b - r (kReward, b = meta reward
// bound) or a uniformly drawn different action (kAction).
Dataset TransitionFlipAttack(const Dataset& dataset,
                             const std::vector<int>& flat_indices,
                             FlipMode mode, Rng& rng,
                             int num_actions = kNumGridActions);

std::vector<int> SelectTrajectories(const Dataset& dataset, int budget,
                                    SelectionMode mode, Rng& rng);
std::vector<int> SelectTransitions(const Dataset& dataset, int budget,
                                   SelectionMode mode, Rng& rng);

// Selects indices per spec.selection and applies spec.kind; the result's
// meta.attack records the spec.
Dataset ApplyAttack(const Dataset& dataset, const AttackSpec& spec,
                    int num_actions = kNumGridActions);

// Poisoning size between two datasets of identical shape: differing
// transitions (kTransition) or trajectories with any differing step
// (kTrajectory). Throws InputError when the shapes differ.
int DatasetDistance(const Dataset& a, const Dataset& b, PrivacyLevel level);

}  // namespace dpcert

#endif  // DPCERT_ATTACKS_H_
