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

#include "dpcert/attacks.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "dpcert/errors.h"
#include "json.hpp"

namespace dpcert {
namespace {

void CheckDistinct(const std::vector<int>& indices, int limit,
                   const char* what) {
  std::set<int> seen;
  for (int i : indices) {
    if (i < 0 || i >= limit) {
      throw InputError(std::string(what) + " index " + std::to_string(i) +
                       " out of range");
    }
    if (!seen.insert(i).second) {
      throw InputError(std::string(what) + " indices must be distinct");
    }
  }
}

std::vector<Transition*> FlattenMutable(Dataset& dataset) {
  std::vector<Transition*> flat;
  for (auto& traj : dataset.mutable_trajectories()) {
    for (auto& step : traj.steps) flat.push_back(&step);
  }
  return flat;
}

// Top `budget` indices by descending score, ties to the lower index.
std::vector<int> TopByScore(const std::vector<double>& score, int budget) {
  std::vector<int> order(score.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return score[x] > score[y]; });
  order.resize(budget);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<int> UniformSubset(int n, int budget, Rng& rng) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> picked;
  std::sample(all.begin(), all.end(), std::back_inserter(picked), budget, rng);
  return picked;
}

void CheckBudget(int budget, int limit) {
  if (budget < 0 || budget > limit) {
    throw InputError("attack budget " + std::to_string(budget) +
                     " outside [0, " + std::to_string(limit) + "]");
  }
}

}  // namespace

std::string ToString(AttackKind kind) {
  switch (kind) {
    case AttackKind::kRandomReward:
      return "random_reward";
    case AttackKind::kAdversarialReward:
      return "adversarial_reward";
    case AttackKind::kTransitionFlip:
      return "transition_flip";
  }
  return "";
}

AttackKind AttackKindFromString(const std::string& s) {
  if (s == "random_reward") return AttackKind::kRandomReward;
  if (s == "adversarial_reward") return AttackKind::kAdversarialReward;
  if (s == "transition_flip") return AttackKind::kTransitionFlip;
  throw ConfigError("unknown attack kind '" + s + "'");
}

std::string ToString(FlipMode mode) {
  return mode == FlipMode::kReward ? "reward" : "action";
}

FlipMode FlipModeFromString(const std::string& s) {
  if (s == "reward") return FlipMode::kReward;
  if (s == "action") return FlipMode::kAction;
  throw ConfigError("unknown flip mode '" + s + "'");
}

std::string ToString(SelectionMode mode) {
  return mode == SelectionMode::kTargeted ? "targeted" : "uniform";
}

SelectionMode SelectionModeFromString(const std::string& s) {
  if (s == "targeted") return SelectionMode::kTargeted;
  if (s == "uniform") return SelectionMode::kUniform;
  throw ConfigError("unknown selection mode '" + s + "'");
}

std::string AttackSpec::ToJson() const {
  nlohmann::ordered_json j;
  j["kind"] = ToString(kind);
  j["level"] = ToString(level);
  j["budget"] = budget;
  j["seed"] = seed;
  j["selection"] = ToString(selection);
  if (kind == AttackKind::kTransitionFlip) j["mode"] = ToString(flip_mode);
  return j.dump();
}

Dataset RandomRewardAttack(const Dataset& dataset,
                           const std::vector<int>& trajectory_indices,
                           Rng& rng) {
  CheckDistinct(trajectory_indices, dataset.num_trajectories(), "trajectory");
  Dataset out = dataset;
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int j : trajectory_indices) {
    for (Transition& step : out.mutable_trajectories()[j].steps) {
      step.reward = uniform(rng);
    }
  }
  return out;
}

Dataset AdversarialRewardAttack(const Dataset& dataset,
                                const std::vector<int>& trajectory_indices) {
  CheckDistinct(trajectory_indices, dataset.num_trajectories(), "trajectory");
  Dataset out = dataset;
  for (int j : trajectory_indices) {
    for (Transition& step : out.mutable_trajectories()[j].steps) {
      step.reward = -step.reward;
    }
  }
  return out;
}

Dataset TransitionFlipAttack(const Dataset& dataset,
                             const std::vector<int>& flat_indices,
                             FlipMode mode, Rng& rng, int num_actions) {
  CheckDistinct(flat_indices, dataset.num_transitions(), "transition");
  if (mode == FlipMode::kAction && num_actions < 2) {
    throw InputError("action flips need at least two actions");
  }
  Dataset out = dataset;
  const std::vector<Transition*> flat = FlattenMutable(out);
  const double b = dataset.meta().reward_max;
  for (int i : flat_indices) {
    Transition& step = *flat[i];
    if (mode == FlipMode::kReward) {
      step.reward = b - step.reward;
    } else {
      int other =
          std::uniform_int_distribution<int>(0, num_actions - 2)(rng);
      if (other >= step.action) ++other;
      step.action = other;
    }
  }
  return out;
}

std::vector<int> SelectTrajectories(const Dataset& dataset, int budget,
                                    SelectionMode mode, Rng& rng) {
  CheckBudget(budget, dataset.num_trajectories());
  if (mode == SelectionMode::kUniform) {
    return UniformSubset(dataset.num_trajectories(), budget, rng);
  }
  std::vector<double> mass;
  for (const Trajectory& traj : dataset.trajectories()) {
    double m = 0.0;
    for (const Transition& step : traj.steps) m += std::abs(step.reward);
    mass.push_back(m);
  }
  return TopByScore(mass, budget);
}

std::vector<int> SelectTransitions(const Dataset& dataset, int budget,
                                   SelectionMode mode, Rng& rng) {
  CheckBudget(budget, dataset.num_transitions());
  if (mode == SelectionMode::kUniform) {
    return UniformSubset(dataset.num_transitions(), budget, rng);
  }
  std::vector<double> mass;
  for (const Transition* step : dataset.Flatten()) {
    mass.push_back(std::abs(step->reward));
  }
  return TopByScore(mass, budget);
}

Dataset ApplyAttack(const Dataset& dataset, const AttackSpec& spec,
                    int num_actions) {
  Rng rng(spec.seed);
  Dataset out;
  switch (spec.kind) {
    case AttackKind::kRandomReward:
      out = RandomRewardAttack(
          dataset,
          SelectTrajectories(dataset, spec.budget, spec.selection, rng), rng);
      break;
    case AttackKind::kAdversarialReward:
      out = AdversarialRewardAttack(
          dataset,
          SelectTrajectories(dataset, spec.budget, spec.selection, rng));
      break;
    case AttackKind::kTransitionFlip:
      out = TransitionFlipAttack(
          dataset,
          SelectTransitions(dataset, spec.budget, spec.selection, rng),
          spec.flip_mode, rng, num_actions);
      break;
  }
  out.mutable_meta().attack = spec.ToJson();
  return out;
}

int DatasetDistance(const Dataset& a, const Dataset& b, PrivacyLevel level) {
  if (a.num_trajectories() != b.num_trajectories()) {
    throw InputError("datasets differ in trajectory count");
  }
  int distance = 0;
  for (int i = 0; i < a.num_trajectories(); ++i) {
    const auto& sa = a.trajectories()[i].steps;
    const auto& sb = b.trajectories()[i].steps;
    if (sa.size() != sb.size()) {
      throw InputError("trajectory " + std::to_string(i) + " differs in length");
    }
    int differing = 0;
    for (std::size_t t = 0; t < sa.size(); ++t) differing += !(sa[t] == sb[t]);
    distance += level == PrivacyLevel::kTransition ? differing : (differing > 0);
  }
  return distance;
}

}  // namespace dpcert
