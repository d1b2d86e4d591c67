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

#include "dpcert/mdp.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "dpcert/errors.h"

namespace dpcert {
namespace {

constexpr int kValueIterationCap = 1'000'000;

int Move(int cell, int action, int width, int height) {
  int row = cell / width;
  int col = cell % width;
  switch (action) {
    case kUp:
      row = std::max(0, row - 1);
      break;
    case kDown:
      row = std::min(height - 1, row + 1);
      break;
    case kLeft:
      col = std::max(0, col - 1);
      break;
    case kRight:
      col = std::min(width - 1, col + 1);
      break;
  }
  return row * width + col;
}

std::array<int, 2> Perpendicular(int action) {
  if (action == kUp || action == kDown) return {kLeft, kRight};
  return {kUp, kDown};
}

// Outcome distribution of (state, action): up to three (cell, prob) pairs.
struct Outcome {
  int cell;
  double prob;
};

std::vector<Outcome> Outcomes(int state, int action,
                              const GridWorldConfig& config) {
  std::vector<Outcome> out;
  const double p_main = 1.0 - config.slip_prob;
  if (p_main > 0.0) {
    out.push_back({Move(state, action, config.width, config.height), p_main});
  }
  if (config.slip_prob > 0.0) {
    for (int side : Perpendicular(action)) {
      out.push_back({Move(state, side, config.width, config.height),
                     config.slip_prob / 2.0});
    }
  }
  return out;
}

}  // namespace

Dataset::Dataset(DatasetMeta meta, std::vector<Trajectory> trajectories)
    : meta_(std::move(meta)), trajectories_(std::move(trajectories)) {}

int Dataset::num_transitions() const {
  int n = 0;
  for (const auto& traj : trajectories_) n += static_cast<int>(traj.steps.size());
  return n;
}

std::vector<const Transition*> Dataset::Flatten() const {
  std::vector<const Transition*> flat;
  flat.reserve(num_transitions());
  for (const auto& traj : trajectories_) {
    for (const auto& step : traj.steps) flat.push_back(&step);
  }
  return flat;
}

void Dataset::Validate() const {
  if (trajectories_.empty()) throw InputError("dataset has no trajectories");
  if (meta_.horizon < 1) throw InputError("dataset horizon must be >= 1");
  for (const auto& traj : trajectories_) {
    if (traj.steps.empty()) {
      throw InputError("trajectory " + std::to_string(traj.traj_id) +
                       " is empty");
    }
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
      const Transition& step = traj.steps[i];
      const std::string where = "trajectory " + std::to_string(traj.traj_id) +
                                " step " + std::to_string(i);
      if (step.traj_id != traj.traj_id) {
        throw InputError(where + ": traj id mismatch");
      }
      if (step.t != static_cast<int>(i)) {
        throw InputError(where + ": non-consecutive t");
      }
      if (step.t >= meta_.horizon) {
        throw InputError(where + ": t exceeds horizon");
      }
      if (!std::isfinite(step.reward)) {
        throw InputError(where + ": non-finite reward");
      }
      const bool last = i + 1 == traj.steps.size();
      if (step.done && !last) {
        throw InputError(where + ": done before the last step");
      }
      if (!last) {
        const Transition& next = traj.steps[i + 1];
        if (step.next_state != next.state ||
            step.next_state_vec != next.state_vec) {
          throw InputError(where + ": next state does not chain");
        }
      }
    }
  }
}

double GridWorldConfig::LandingReward(int cell) const {
  if (auto it = goal_cells.find(cell); it != goal_cells.end()) {
    return it->second;
  }
  if (auto it = pit_cells.find(cell); it != pit_cells.end()) return it->second;
  return step_reward;
}

std::string GridWorldConfig::Id() const {
  std::ostringstream os;
  os << name << "-" << width << "x" << height << "-slip" << slip_prob;
  return os.str();
}

std::pair<double, double> GridWorldConfig::CumulativeRewardBounds() const {
  std::vector<double> terminal;
  for (const auto& [cell, r] : goal_cells) terminal.push_back(r);
  for (const auto& [cell, r] : pit_cells) terminal.push_back(r);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double prefix = 0.0;  // discounted step rewards before the final step
  double discount_k = 1.0;
  for (int k = 1; k <= horizon; ++k) {
    // An episode ending at step k collects k - 1 step rewards followed by a
    // terminal reward, or only step rewards when it is cut at the horizon.
    for (double r : terminal) {
      lo = std::min(lo, prefix + discount_k * r);
      hi = std::max(hi, prefix + discount_k * r);
    }
    if (k == horizon) {
      lo = std::min(lo, prefix + discount_k * step_reward);
      hi = std::max(hi, prefix + discount_k * step_reward);
    }
    prefix += discount_k * step_reward;
    discount_k *= discount;
  }
  return {lo, hi};
}

void GridWorldConfig::Validate() const {
  if (width < 1 || height < 1) throw ConfigError("grid must be at least 1x1");
  auto valid = [&](int c) { return c >= 0 && c < num_states(); };
  if (!valid(start_cell)) throw ConfigError("start cell outside the grid");
  for (const auto& [cell, r] : goal_cells) {
    if (!valid(cell)) throw ConfigError("goal cell outside the grid");
    if (!std::isfinite(r)) throw ConfigError("goal reward must be finite");
  }
  for (const auto& [cell, r] : pit_cells) {
    if (!valid(cell)) throw ConfigError("pit cell outside the grid");
    if (IsGoal(cell)) throw ConfigError("cell is both goal and pit");
    if (!std::isfinite(r)) throw ConfigError("pit reward must be finite");
  }
  if (IsTerminal(start_cell)) throw ConfigError("start cell is terminal");
  if (!(slip_prob >= 0.0 && slip_prob <= 1.0)) {
    throw ConfigError("slip_prob must lie in [0, 1]");
  }
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!(discount > 0.0 && discount <= 1.0)) {
    throw ConfigError("discount must lie in (0, 1]");
  }
  if (!std::isfinite(step_reward)) throw ConfigError("step reward not finite");
}

StepResult GridWorldStep(int state, int action, const GridWorldConfig& config,
                         Rng& rng) {
  if (state < 0 || state >= config.num_states()) {
    throw InputError("invalid cell " + std::to_string(state));
  }
  if (action < 0 || action >= kNumGridActions) {
    throw InputError("invalid action " + std::to_string(action));
  }
  int direction = action;
  if (config.slip_prob > 0.0) {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < config.slip_prob) {
      direction = Perpendicular(action)[u < config.slip_prob / 2.0 ? 0 : 1];
    }
  }
  StepResult result;
  result.next_state = Move(state, direction, config.width, config.height);
  result.reward = config.LandingReward(result.next_state);
  result.done = config.IsTerminal(result.next_state);
  return result;
}

int QTable::GreedyAction(int state) const {
  Eigen::Index best;
  values.row(state).maxCoeff(&best);  // first maximum on ties
  return static_cast<int>(best);
}

QTable ValueIteration(const GridWorldConfig& config, double tol) {
  config.Validate();
  if (!(tol > 0.0)) throw InputError("value iteration tolerance must be > 0");
  const int num_states = config.num_states();

  std::vector<std::vector<Outcome>> outcomes(num_states * kNumGridActions);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < kNumGridActions; ++a) {
      outcomes[s * kNumGridActions + a] = Outcomes(s, a, config);
    }
  }

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(num_states, kNumGridActions);
  for (int iter = 0; iter < kValueIterationCap; ++iter) {
    const Eigen::VectorXd v = q.rowwise().maxCoeff();
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(num_states, kNumGridActions);
    for (int s = 0; s < num_states; ++s) {
      if (config.IsTerminal(s)) continue;
      for (int a = 0; a < kNumGridActions; ++a) {
        double total = 0.0;
        for (const Outcome& o : outcomes[s * kNumGridActions + a]) {
          const double cont =
              config.IsTerminal(o.cell) ? 0.0 : config.discount * v(o.cell);
          total += o.prob * (config.LandingReward(o.cell) + cont);
        }
        next(s, a) = total;
      }
    }
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = std::move(next);
    if (change <= tol) return QTable{std::move(q)};
  }
  throw NumericError("value iteration did not converge");
}

Policy GreedyPolicy(const QTable& q) {
  return [q](int state, Rng&) { return q.GreedyAction(state); };
}

Policy EpsilonGreedyPolicy(const QTable& q, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InputError("exploration rate must lie in [0, 1]");
  }
  return [q, epsilon](int state, Rng& rng) {
    if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon) {
      return std::uniform_int_distribution<int>(0, kNumGridActions - 1)(rng);
    }
    return q.GreedyAction(state);
  };
}

Trajectory Rollout(const GridWorldConfig& config, const Policy& policy,
                   Rng& rng, int horizon, int traj_id) {
  if (horizon < 1) throw InputError("rollout horizon must be >= 1");
  Trajectory traj;
  traj.traj_id = traj_id;
  int state = config.start_cell;
  for (int t = 0; t < horizon; ++t) {
    const int action = policy(state, rng);
    if (action < 0 || action >= kNumGridActions) {
      throw InputError("policy returned out-of-range action " +
                       std::to_string(action));
    }
    const StepResult step = GridWorldStep(state, action, config, rng);
    traj.steps.push_back(Transition{.traj_id = traj_id,
                                    .t = t,
                                    .state = state,
                                    .action = action,
                                    .reward = step.reward,
                                    .next_state = step.next_state,
                                    .done = step.done});
    if (step.done) break;
    state = step.next_state;
  }
  return traj;
}

double CumulativeReward(const Trajectory& trajectory, double gamma) {
  double total = 0.0;
  double discount = 1.0;
  for (const Transition& step : trajectory.steps) {
    total += discount * step.reward;
    discount *= gamma;
  }
  return total;
}

Dataset GenerateDataset(const GridWorldConfig& config,
                        const BehaviorSpec& behavior, int num_trajectories,
                        Rng& rng) {
  config.Validate();
  if (num_trajectories < 1) throw InputError("M must be >= 1");
  const Policy policy =
      EpsilonGreedyPolicy(ValueIteration(config), behavior.epsilon);

  std::vector<Trajectory> trajectories;
  trajectories.reserve(num_trajectories);
  for (int j = 0; j < num_trajectories; ++j) {
    trajectories.push_back(Rollout(config, policy, rng, config.horizon, j));
  }
  const auto [lo, hi] = config.CumulativeRewardBounds();
  DatasetMeta meta{.env = config.Id(),
                   .horizon = config.horizon,
                   .gamma = config.discount,
                   .reward_min = lo,
                   .reward_max = hi};
  return Dataset(std::move(meta), std::move(trajectories));
}

}  // namespace dpcert
