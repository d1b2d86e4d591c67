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

#include "dpcert/linear_q.h"

#include "dpcert/errors.h"

namespace dpcert {

FeatureMap FeatureMap::FromId(const std::string& id, int dim) {
  if (id == "onehot") return OneHot(dim);
  if (id == "raw") return Raw(dim);
  throw InputError("unknown feature map '" + id + "'");
}

std::string FeatureMap::Id() const {
  return kind == FeatureKind::kOneHot ? "onehot" : "raw";
}

Eigen::VectorXd FeatureMap::operator()(int cell,
                                       const std::vector<double>& vec) const {
  if (kind == FeatureKind::kOneHot) {
    if (cell < 0 || cell >= dim) {
      throw InputError("cell " + std::to_string(cell) +
                       " outside one-hot feature range");
    }
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(dim);
    phi(cell) = 1.0;
    return phi;
  }
  if (static_cast<int>(vec.size()) != dim) {
    throw InputError("observation length does not match feature dim");
  }
  return Eigen::Map<const Eigen::VectorXd>(vec.data(), dim);
}

LinearQ::LinearQ(FeatureMap features, int num_actions)
    : LinearQ(features, num_actions,
              Eigen::VectorXd::Zero(features.dim * num_actions)) {}

LinearQ::LinearQ(FeatureMap features, int num_actions, Eigen::VectorXd weights)
    : features_(features),
      num_actions_(num_actions),
      weights_(std::move(weights)) {
  if (features_.dim < 1 || num_actions_ < 1) {
    throw InputError("LinearQ needs positive feature dim and action count");
  }
  if (weights_.size() != features_.dim * num_actions_) {
    throw InputError("weight vector has the wrong length");
  }
}

Eigen::VectorXd LinearQ::QValues(const Eigen::VectorXd& phi) const {
  const Eigen::Map<const Eigen::MatrixXd> w(weights_.data(), features_.dim,
                                            num_actions_);
  return w.transpose() * phi;
}

Eigen::VectorXd LinearQ::QValues(int cell) const {
  if (features_.kind == FeatureKind::kOneHot) {
    if (cell < 0 || cell >= features_.dim) {
      throw InputError("cell outside one-hot feature range");
    }
    Eigen::VectorXd q(num_actions_);
    for (int a = 0; a < num_actions_; ++a) q(a) = Block(a)(cell);
    return q;
  }
  throw InputError("QValues(cell) needs a one-hot feature map");
}

int LinearQ::GreedyAction(const Eigen::VectorXd& phi) const {
  Eigen::Index best;
  QValues(phi).maxCoeff(&best);
  return static_cast<int>(best);
}

int LinearQ::GreedyAction(int cell) const {
  Eigen::Index best;
  QValues(cell).maxCoeff(&best);
  return static_cast<int>(best);
}

Eigen::VectorXd TdGradient(const LinearQ& model, const Transition& transition,
                           double gamma, const LinearQ* target) {
  if (target == nullptr) target = &model;
  if (transition.action < 0 || transition.action >= model.num_actions()) {
    throw InputError("transition action outside the model's action range");
  }
  const FeatureMap& fm = model.features();
  const Eigen::VectorXd phi = fm(transition.state, transition.state_vec);
  double y = transition.reward;
  if (!transition.done) {
    const Eigen::VectorXd phi_next =
        fm(transition.next_state, transition.next_state_vec);
    y += gamma * target->QValues(phi_next).maxCoeff();
  }
  const double error = model.Block(transition.action).dot(phi) - y;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(model.weights().size());
  grad.segment(transition.action * fm.dim, fm.dim) = error * phi;
  return grad;
}

}  // namespace dpcert
