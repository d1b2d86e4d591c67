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

// Tabular episodic MDPs: the transition/trajectory/dataset data model,
// gridworld environments, rollouts and a value-iteration oracle.

#ifndef DPCERT_MDP_H_
#define DPCERT_MDP_H_

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpcert/rng.h"

namespace dpcert {

// Gridworld actions. Rows grow downwards, so kUp decrements the row.
enum GridAction : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr int kNumGridActions = 4;

// One (s, a, r, s') record. States are integer cell indices; `state_vec` and
// `next_state_vec` carry real-vector observations when the source
// environment is continuous (then `state`/`next_state` are -1).
struct Transition {
  int traj_id = 0;
  int t = 0;
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = 0;
  bool done = false;
  std::vector<double> state_vec;
  std::vector<double> next_state_vec;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct Trajectory {
  int traj_id = 0;
  std::vector<Transition> steps;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

struct DatasetMeta {
  std::string env;
  int horizon = 1;
  double gamma = 1.0;
  // Bounds on the discounted cumulative reward of one episode.
  double reward_min = 0.0;
  double reward_max = 1.0;
  // Non-empty for poisoned datasets; a JSON description of the attack.
  std::string attack;
  std::string config_hash;

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

class Dataset {
 public:
  Dataset() = default;
  Dataset(DatasetMeta meta, std::vector<Trajectory> trajectories);

  const DatasetMeta& meta() const { return meta_; }
  DatasetMeta& mutable_meta() { return meta_; }
  const std::vector<Trajectory>& trajectories() const { return trajectories_; }
  std::vector<Trajectory>& mutable_trajectories() { return trajectories_; }

  int num_trajectories() const {
    return static_cast<int>(trajectories_.size());
  }
  int num_transitions() const;

  // Transitions in trajectory order; index i is the "flat index" used by
  // transition-level attacks.
  std::vector<const Transition*> Flatten() const;

  // Throws InputError when a structural invariant is broken: M >= 1,
  // non-empty trajectories with consecutive t, done only on the last step,
  // consistent ids, chained states and finite rewards.
  void Validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  DatasetMeta meta_;
  std::vector<Trajectory> trajectories_;
};

struct GridWorldConfig {
  std::string name = "gridworld";
  int width = 4;
  int height = 4;
  int start_cell = 0;
  std::map<int, double> goal_cells;
  std::map<int, double> pit_cells;
  double step_reward = 0.0;
  double slip_prob = 0.0;
  int horizon = 16;
  double discount = 0.95;

  int num_states() const { return width * height; }
  bool IsGoal(int cell) const { return goal_cells.contains(cell); }
  bool IsPit(int cell) const { return pit_cells.contains(cell); }
  bool IsTerminal(int cell) const { return IsGoal(cell) || IsPit(cell); }
  // Reward collected on landing in `cell`.
  double LandingReward(int cell) const;

  // Environment identifier recorded in dataset and ensemble metadata.
  std::string Id() const;

  // Bounds [a, b] on the discounted cumulative reward of any episode of at
  // most `horizon` steps.
  std::pair<double, double> CumulativeRewardBounds() const;

  // Throws ConfigError on invalid geometry, probabilities or horizon.
  void Validate() const;
};

struct StepResult {
  int next_state = 0;
  double reward = 0.0;
  bool done = false;

  friend bool operator==(const StepResult&, const StepResult&) = default;
};

// One environment step. Moves in the commanded direction with probability
// 1 - slip_prob and otherwise in one of the two perpendicular directions,
// chosen uniformly; walls clamp. No randomness is consumed when
// slip_prob == 0.
StepResult GridWorldStep(int state, int action, const GridWorldConfig& config,
                         Rng& rng);

// |S| x |A| action values.
struct QTable {
  Eigen::MatrixXd values;

  // Ties break toward the lowest action index.
  int GreedyAction(int state) const;
  double Value(int state) const { return values.row(state).maxCoeff(); }
};

// Discounted Bellman fixed point, iterated from zero until one more backup
// changes no entry by more than `tol`. Goal and pit cells are absorbing
// with zero continuation value.
QTable ValueIteration(const GridWorldConfig& config, double tol = 1e-10);

// Maps a state to an action. Stochastic policies draw from the rng they are
// given; deterministic ones ignore it.
using Policy = std::function<int(int state, Rng& rng)>;

Policy GreedyPolicy(const QTable& q);
Policy EpsilonGreedyPolicy(const QTable& q, double epsilon);

// Plays one episode from config.start_cell for at most `horizon` steps.
Trajectory Rollout(const GridWorldConfig& config, const Policy& policy,
                   Rng& rng, int horizon, int traj_id = 0);

// sum_t gamma^t r_t over the trajectory's steps.
double CumulativeReward(const Trajectory& trajectory, double gamma);

struct BehaviorSpec {
  // Exploration rate of the epsilon-greedy behaviour policy.
  double epsilon = 0.3;
};

// M trajectories of the epsilon-greedy policy over the value-iteration
// optimum. Reproducible given the rng state.
Dataset GenerateDataset(const GridWorldConfig& config,
                        const BehaviorSpec& behavior, int num_trajectories,
                        Rng& rng);

}  // namespace dpcert

#endif  // DPCERT_MDP_H_
