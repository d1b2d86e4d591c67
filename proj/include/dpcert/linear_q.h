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

// Linear-in-features action-value model and its TD gradient.

#ifndef DPCERT_LINEAR_Q_H_
#define DPCERT_LINEAR_Q_H_

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpcert/mdp.h"

namespace dpcert {

enum class FeatureKind { kOneHot, kRaw };

// phi(s): one-hot over cell indices, or the raw real-vector observation.
struct FeatureMap {
  FeatureKind kind = FeatureKind::kOneHot;
  int dim = 0;

  static FeatureMap OneHot(int num_states) {
    return {FeatureKind::kOneHot, num_states};
  }
  static FeatureMap Raw(int dim) { return {FeatureKind::kRaw, dim}; }
  // Inverse of Id().
  static FeatureMap FromId(const std::string& id, int dim);

  std::string Id() const;
  Eigen::VectorXd operator()(int cell, const std::vector<double>& vec) const;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;
};

// q(s, a) = <w_a, phi(s)> where w_a is the a-th length-`dim` block of the
// flat weight vector.
class LinearQ {
 public:
  LinearQ(FeatureMap features, int num_actions);
  LinearQ(FeatureMap features, int num_actions, Eigen::VectorXd weights);

  const FeatureMap& features() const { return features_; }
  int num_actions() const { return num_actions_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::VectorXd& mutable_weights() { return weights_; }

  auto Block(int action) { return weights_.segment(action * features_.dim, features_.dim); }
  auto Block(int action) const {
    return weights_.segment(action * features_.dim, features_.dim);
  }

  Eigen::VectorXd QValues(const Eigen::VectorXd& phi) const;
  Eigen::VectorXd QValues(int cell) const;
  // First maximal action.
  int GreedyAction(const Eigen::VectorXd& phi) const;
  int GreedyAction(int cell) const;

  friend bool operator==(const LinearQ&, const LinearQ&) = default;

 private:
  FeatureMap features_;
  int num_actions_;
  Eigen::VectorXd weights_;
};

// Semi-gradient of 0.5 (q(s,a) - y)^2 with
// y = r + gamma (1 - done) max_a' q_target(s', a'), the target held
// constant. Only the (a, phi(s)) block is non-zero. `target` defaults to
// `model` itself.
Eigen::VectorXd TdGradient(const LinearQ& model, const Transition& transition,
                           double gamma, const LinearQ* target = nullptr);

// g / max(1, |g| / C). C may be +inf, which disables clipping.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> ClipGradient(
    const Eigen::MatrixBase<Derived>& g, typename Derived::Scalar clip_norm) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = g.norm();
  const Scalar scale = std::max(Scalar(1), norm / clip_norm);
  return g / scale;
}

}  // namespace dpcert

#endif  // DPCERT_LINEAR_Q_H_
