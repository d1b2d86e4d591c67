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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dpcert/errors.h"

namespace dpcert {
namespace {

GridWorldConfig Grid(int w, int h, double slip, double gamma = 0.95) {
  GridWorldConfig c;
  c.width = w;
  c.height = h;
  c.start_cell = 0;
  c.goal_cells = {{w * h - 1, 1.0}};
  c.slip_prob = slip;
  c.discount = gamma;
  c.horizon = 4 * (w + h);
  return c;
}

// Row/column mover written independently of GridWorldStep.
int Move(int cell, int action, int w, int h) {
  int row = cell / w, col = cell % w;
  if (action == kUp) row = std::max(0, row - 1);
  if (action == kDown) row = std::min(h - 1, row + 1);
  if (action == kLeft) col = std::max(0, col - 1);
  if (action == kRight) col = std::min(w - 1, col + 1);
  return row * w + col;
}

// Transition kernel P(s' | s, a) built by hand.
std::vector<std::pair<int, double>> Kernel(const GridWorldConfig& c, int s,
                                           int a) {
  static const int kPerp[4][2] = {
      {kLeft, kRight}, {kLeft, kRight}, {kUp, kDown}, {kUp, kDown}};
  std::vector<std::pair<int, double>> out = {
      {Move(s, a, c.width, c.height), 1.0 - c.slip_prob}};
  for (int p : kPerp[a]) {
    out.push_back({Move(s, p, c.width, c.height), c.slip_prob / 2});
  }
  return out;
}

// Backward induction over (s, t) for `steps` stages; returns Q_0.
Eigen::MatrixXd FiniteHorizonDp(const GridWorldConfig& c, int steps) {
  const int n = c.num_states();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, 4);
  for (int t = 0; t < steps; ++t) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, 4);
    for (int s = 0; s < n; ++s) {
      if (c.IsTerminal(s)) continue;
      for (int a = 0; a < 4; ++a) {
        for (const auto& [s2, p] : Kernel(c, s, a)) {
          const double reward = c.IsGoal(s2)  ? c.goal_cells.at(s2)
                                : c.IsPit(s2) ? c.pit_cells.at(s2)
                                              : c.step_reward;
          const double cont = c.IsTerminal(s2) ? 0.0 : q.row(s2).maxCoeff();
          next(s, a) += p * (reward + c.discount * cont);
        }
      }
    }
    q = next;
  }
  return q;
}

TEST(GridWorldStepTest, MovesIntoGoalDeterministically) {
  GridWorldConfig c = Grid(3, 3, 0.0);
  Rng rng(1);
  const StepResult r = GridWorldStep(7, kRight, c, rng);
  EXPECT_EQ(r, (StepResult{8, 1.0, true}));
}

TEST(GridWorldStepTest, DeterministicIgnoresRng) {
  GridWorldConfig c = Grid(4, 4, 0.0);
  for (int s = 0; s < c.num_states(); ++s) {
    for (int a = 0; a < 4; ++a) {
      Rng r1(1), r2(999);
      EXPECT_EQ(GridWorldStep(s, a, c, r1), GridWorldStep(s, a, c, r2));
    }
  }
}

TEST(GridWorldStepTest, SlipFrequency) {
  GridWorldConfig c = Grid(5, 5, 0.2);
  Rng rng(42);
  const int kDraws = 100000;
  int up = 0, left = 0, right = 0;
  for (int i = 0; i < kDraws; ++i) {
    const int s2 = GridWorldStep(12, kUp, c, rng).next_state;
    up += s2 == 7;
    left += s2 == 11;
    right += s2 == 13;
  }
  EXPECT_NEAR(static_cast<double>(up) / kDraws, 0.8, 0.01);
  EXPECT_NEAR(static_cast<double>(left) / kDraws, 0.1, 0.01);
  EXPECT_NEAR(static_cast<double>(right) / kDraws, 0.1, 0.01);
  EXPECT_EQ(up + left + right, kDraws);
}

TEST(GridWorldStepTest, WallsClamp) {
  GridWorldConfig c = Grid(3, 3, 0.0);
  Rng rng(1);
  EXPECT_EQ(GridWorldStep(0, kUp, c, rng).next_state, 0);
  EXPECT_EQ(GridWorldStep(0, kLeft, c, rng).next_state, 0);
  EXPECT_EQ(GridWorldStep(2, kRight, c, rng).next_state, 2);
}

TEST(GridWorldStepTest, RejectsBadInput) {
  GridWorldConfig c = Grid(3, 3, 0.0);
  Rng rng(1);
  EXPECT_THROW(GridWorldStep(-1, kUp, c, rng), InputError);
  EXPECT_THROW(GridWorldStep(9, kUp, c, rng), InputError);
  EXPECT_THROW(GridWorldStep(0, 4, c, rng), InputError);
}

TEST(GridWorldConfigTest, ValidateRejectsBadConfigs) {
  GridWorldConfig c = Grid(3, 3, 0.0);
  c.slip_prob = 1.5;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = Grid(3, 3, 0.0);
  c.discount = 0.0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = Grid(3, 3, 0.0);
  c.start_cell = 20;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = Grid(3, 3, 0.0);
  c.horizon = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_NO_THROW(Grid(3, 3, 0.1).Validate());
}

TEST(ValueIterationTest, OneStepMdp) {
  GridWorldConfig c = Grid(2, 1, 0.0, 1.0);
  const QTable q = ValueIteration(c);
  EXPECT_NEAR(q.values(0, kRight), 1.0, 1e-12);
}

TEST(ValueIterationTest, GeometricDiscounting) {
  GridWorldConfig c = Grid(3, 3, 0.0, 0.9);
  const QTable q = ValueIteration(c);
  const int d = 4;  // shortest path length from 0 to 8
  EXPECT_NEAR(q.values(0, q.GreedyAction(0)), std::pow(0.9, d - 1), 1e-9);
  EXPECT_EQ(q.GreedyAction(0), kDown);  // kDown and kRight tie; lowest wins
}

TEST(ValueIterationTest, MatchesBruteForceDpWithSlip) {
  GridWorldConfig c = Grid(3, 3, 1.0 / 3.0, 0.9);
  c.pit_cells = {{4, -0.5}};
  c.step_reward = -0.01;
  const QTable q = ValueIteration(c, 1e-12);
  // 0.9^400 is far below the comparison tolerance.
  const Eigen::MatrixXd oracle = FiniteHorizonDp(c, 400);
  EXPECT_LT((q.values - oracle).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ValueIterationTest, FixedPoint) {
  GridWorldConfig c = Grid(4, 4, 0.1);
  const double tol = 1e-10;
  const QTable q = ValueIteration(c, tol);
  Eigen::MatrixXd next = Eigen::MatrixXd::Zero(c.num_states(), 4);
  for (int s = 0; s < c.num_states(); ++s) {
    if (c.IsTerminal(s)) continue;
    for (int a = 0; a < 4; ++a) {
      for (const auto& [s2, p] : Kernel(c, s, a)) {
        next(s, a) += p * (c.LandingReward(s2) +
                           (c.IsTerminal(s2) ? 0.0
                                             : c.discount * q.values.row(s2).maxCoeff()));
      }
    }
  }
  EXPECT_LE((next - q.values).cwiseAbs().maxCoeff(), tol);
}

TEST(RolloutTest, DeterministicAcrossRngs) {
  GridWorldConfig c = Grid(4, 4, 0.0);
  const Policy policy = GreedyPolicy(ValueIteration(c));
  Rng r1(1), r2(2);
  EXPECT_EQ(Rollout(c, policy, r1, c.horizon), Rollout(c, policy, r2, c.horizon));
}

TEST(RolloutTest, HorizonOne) {
  GridWorldConfig c = Grid(4, 4, 0.1);
  Rng rng(3);
  const Trajectory t = Rollout(c, GreedyPolicy(ValueIteration(c)), rng, 1);
  EXPECT_EQ(t.steps.size(), 1u);
}

TEST(RolloutTest, GreedyReturnMatchesQ) {
  GridWorldConfig c = Grid(4, 4, 0.0, 0.9);
  const QTable q = ValueIteration(c);
  Rng rng(5);
  const Trajectory t = Rollout(c, GreedyPolicy(q), rng, c.horizon);
  EXPECT_NEAR(CumulativeReward(t, c.discount), q.Value(c.start_cell), 1e-9);
}

TEST(RolloutTest, RejectsOutOfRangeAction) {
  GridWorldConfig c = Grid(3, 3, 0.0);
  Rng rng(1);
  const Policy bad = [](int, Rng&) { return 7; };
  EXPECT_THROW(Rollout(c, bad, rng, 3), InputError);
}

TEST(CumulativeRewardTest, HandExamples) {
  Trajectory t;
  for (double r : {1.0, 0.0, 1.0}) t.steps.push_back(Transition{.reward = r});
  EXPECT_DOUBLE_EQ(CumulativeReward(t, 1.0), 2.0);
  Trajectory u;
  for (double r : {1.0, 1.0}) u.steps.push_back(Transition{.reward = r});
  EXPECT_DOUBLE_EQ(CumulativeReward(u, 0.5), 1.5);
}

TEST(CumulativeRewardTest, MatchesLoopAccumulator) {
  Rng rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Trajectory t;
  for (int i = 0; i < 20; ++i) t.steps.push_back(Transition{.reward = u(rng)});
  double acc = 0.0;
  for (int i = static_cast<int>(t.steps.size()) - 1; i >= 0; --i) {
    acc = t.steps[i].reward + 0.97 * acc;  // Horner form
  }
  EXPECT_NEAR(CumulativeReward(t, 0.97), acc, 1e-12);
}

TEST(GenerateDatasetTest, SingleTrajectory) {
  GridWorldConfig c = Grid(4, 4, 0.1);
  Rng rng(1);
  const Dataset d = GenerateDataset(c, BehaviorSpec{}, 1, rng);
  EXPECT_EQ(d.num_trajectories(), 1);
  EXPECT_NO_THROW(d.Validate());
}

TEST(GenerateDatasetTest, UniformExploration) {
  GridWorldConfig c = Grid(6, 6, 0.0);
  c.horizon = 40;
  Rng rng(2);
  const Dataset d = GenerateDataset(c, BehaviorSpec{1.0}, 600, rng);
  std::vector<int> counts(4, 0);
  int total = 0;
  for (const Transition* t : d.Flatten()) {
    ++counts[t->action];
    ++total;
  }
  ASSERT_GE(total, 10000);
  for (int a = 0; a < 4; ++a) {
    const double f = static_cast<double>(counts[a]) / total;
    // Five binomial standard errors.
    EXPECT_NEAR(f, 0.25, 5 * std::sqrt(0.25 * 0.75 / total)) << "action " << a;
  }
}

TEST(GenerateDatasetTest, InvariantsHold) {
  GridWorldConfig c = Grid(4, 4, 0.2);
  c.pit_cells = {{5, -1.0}};
  c.step_reward = -0.05;
  Rng rng(3);
  const Dataset d = GenerateDataset(c, BehaviorSpec{0.3}, 300, rng);
  d.Validate();
  int n = 0;
  for (const Trajectory& t : d.trajectories()) {
    n += static_cast<int>(t.steps.size());
    const double ret = CumulativeReward(t, c.discount);
    EXPECT_GE(ret, d.meta().reward_min - 1e-12);
    EXPECT_LE(ret, d.meta().reward_max + 1e-12);
    EXPECT_LE(static_cast<int>(t.steps.size()), c.horizon);
  }
  EXPECT_EQ(n, d.num_transitions());
  EXPECT_EQ(static_cast<int>(d.Flatten().size()), n);
}

TEST(GenerateDatasetTest, SameSeedSameData) {
  GridWorldConfig c = Grid(4, 4, 0.1);
  Rng r1(9), r2(9);
  EXPECT_EQ(GenerateDataset(c, BehaviorSpec{}, 50, r1),
            GenerateDataset(c, BehaviorSpec{}, 50, r2));
}

TEST(DatasetTest, ValidateCatchesBrokenChains) {
  GridWorldConfig c = Grid(4, 4, 0.0);
  Rng rng(4);
  Dataset d = GenerateDataset(c, BehaviorSpec{1.0}, 5, rng);
  Dataset broken = d;
  auto& steps = broken.mutable_trajectories()[0].steps;
  ASSERT_GE(steps.size(), 2u);
  steps[1].t = 5;
  EXPECT_THROW(broken.Validate(), InputError);
  broken = d;
  broken.mutable_trajectories()[0].steps[0].reward = NAN;
  EXPECT_THROW(broken.Validate(), InputError);
  EXPECT_THROW(Dataset().Validate(), InputError);
}

TEST(CumulativeRewardBoundsTest, CoversExtremes) {
  GridWorldConfig c = Grid(3, 3, 0.0, 0.9);
  c.step_reward = -0.1;
  c.pit_cells = {{4, -1.0}};
  c.horizon = 6;
  const auto [a, b] = c.CumulativeRewardBounds();
  // Immediate goal is impossible; best is reaching it in as few steps as
  // the bound allows, worst is falling into the pit at step 1 or wandering.
  EXPECT_LE(a, -1.0 * 0.9 - 0.1 + 1e-12);
  EXPECT_GE(b, std::pow(0.9, 3) - 1e-12);
  EXPECT_LE(b, 1.0);
}

}  // namespace
}  // namespace dpcert
