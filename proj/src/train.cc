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

#include "dpcert/train.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "dpcert/errors.h"

namespace dpcert {
namespace {

// Indices of a Poisson sample: each of [0, n) independently with
// probability q. Gaps are drawn geometrically, which has the same law as
// n Bernoulli draws.
std::vector<int> PoissonSample(int n, double q, Rng& rng) {
  std::vector<int> picked;
  if (q >= 1.0) {
    picked.resize(n);
    for (int i = 0; i < n; ++i) picked[i] = i;
    return picked;
  }
  if (q <= 0.0) return picked;
  std::geometric_distribution<long> gap(q);
  for (long i = gap(rng); i < n; i += 1 + gap(rng)) {
    picked.push_back(static_cast<int>(i));
  }
  return picked;
}

void AddGaussian(Eigen::VectorXd& v, double stddev, Rng& rng) {
  if (!(stddev > 0.0)) return;  // also 0 * inf when sigma = 0, C = inf
  std::normal_distribution<double> noise(0.0, stddev);
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) += noise(rng);
}

void CheckShape(const Dataset& dataset, const ModelShape& shape) {
  if (dataset.num_trajectories() == 0 || dataset.num_transitions() == 0) {
    throw InputError("training dataset is empty");
  }
  if (shape.features.dim < 1 || shape.num_actions < 1) {
    throw InputError("model shape must have positive dims");
  }
}

}  // namespace

std::string ToString(PrivacyLevel level) {
  return level == PrivacyLevel::kTransition ? "transition" : "trajectory";
}

PrivacyLevel PrivacyLevelFromString(const std::string& s) {
  if (s == "transition") return PrivacyLevel::kTransition;
  if (s == "trajectory") return PrivacyLevel::kTrajectory;
  throw ConfigError("unknown privacy level '" + s + "'");
}

void SgmConfig::Validate() const {
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) {
    throw ConfigError("sgm sample_rate must lie in (0, 1]");
  }
  if (!(noise_multiplier >= 0.0)) {
    throw ConfigError("noise_multiplier must be >= 0");
  }
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be > 0");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in (0, 1]");
  }
  if (target_refresh < 1) throw ConfigError("target_refresh must be >= 1");
}

void FedAvgConfig::Validate() const {
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) {
    throw ConfigError("fedavg sample_rate must lie in (0, 1]");
  }
  if (!(noise_multiplier >= 0.0)) {
    throw ConfigError("noise_multiplier must be >= 0");
  }
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be > 0");
  if (local_epochs < 1) throw ConfigError("local_epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("gamma must lie in (0, 1]");
  }
  if (target_refresh < 1) throw ConfigError("target_refresh must be >= 1");
}

LinearQ SgmTrain(const Dataset& dataset, const ModelShape& shape,
                 const SgmConfig& config, Rng& rng) {
  config.Validate();
  CheckShape(dataset, shape);
  const std::vector<const Transition*> flat = dataset.Flatten();
  const int n = static_cast<int>(flat.size());
  const double expected_batch = config.sample_rate * n;

  LinearQ model(shape.features, shape.num_actions);
  LinearQ target = model;
  Eigen::VectorXd grad_sum(model.weights().size());
  for (int it = 0; it < config.iterations; ++it) {
    if (it % config.target_refresh == 0) target = model;
    grad_sum.setZero();
    for (int i : PoissonSample(n, config.sample_rate, rng)) {
      grad_sum += ClipGradient(
          TdGradient(model, *flat[i], config.gamma, &target), config.clip_norm);
    }
    AddGaussian(grad_sum, config.noise_multiplier * config.clip_norm, rng);
    model.mutable_weights() -= config.learning_rate / expected_batch * grad_sum;
  }
  return model;
}

LinearQ DpFedAvgTrain(const Dataset& dataset, const ModelShape& shape,
                      const FedAvgConfig& config, Rng& rng) {
  config.Validate();
  CheckShape(dataset, shape);
  const auto& trajectories = dataset.trajectories();
  const int num_traj = dataset.num_trajectories();
  if (config.trajectory_count != num_traj) {
    throw InputError("fedavg trajectory_count must equal the dataset's M");
  }
  const double normalizer = config.sample_rate * num_traj;

  LinearQ model(shape.features, shape.num_actions);
  LinearQ target = model;
  Eigen::VectorXd delta_sum(model.weights().size());
  for (int it = 0; it < config.iterations; ++it) {
    if (it % config.target_refresh == 0) target = model;
    delta_sum.setZero();
    for (int k : PoissonSample(num_traj, config.sample_rate, rng)) {
      const auto& steps = trajectories[k].steps;
      const Eigen::VectorXd start = model.weights();
      LinearQ local = model;
      Eigen::VectorXd grad(start.size());
      for (int epoch = 0; epoch < config.local_epochs; ++epoch) {
        for (std::size_t b = 0; b < steps.size(); b += config.batch_size) {
          const std::size_t end =
              std::min(steps.size(), b + static_cast<std::size_t>(config.batch_size));
          grad.setZero();
          for (std::size_t i = b; i < end; ++i) {
            grad += TdGradient(local, steps[i], config.gamma, &target);
          }
          grad /= static_cast<double>(end - b);
          local.mutable_weights() -= config.learning_rate * grad;
          local.mutable_weights() =
              start + ClipGradient(local.weights() - start, config.clip_norm);
        }
      }
      delta_sum += local.weights() - start;
    }
    delta_sum /= normalizer;
    AddGaussian(delta_sum,
                config.noise_multiplier * config.clip_norm / normalizer, rng);
    model.mutable_weights() += delta_sum;
  }
  return model;
}

TrainingMeta MetaFor(const TrainerConfig& config) {
  TrainingMeta meta;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        meta.level = std::is_same_v<T, SgmConfig> ? PrivacyLevel::kTransition
                                                  : PrivacyLevel::kTrajectory;
        meta.sample_rate = c.sample_rate;
        meta.noise_multiplier = c.noise_multiplier;
        meta.iterations = c.iterations;
        meta.clip_norm = c.clip_norm;
        meta.learning_rate = c.learning_rate;
      },
      config);
  return meta;
}

PolicyEnsemble TrainEnsemble(const Dataset& dataset, const ModelShape& shape,
                             const TrainerConfig& config, int p,
                             std::uint64_t master_seed, int threads) {
  if (p < 1) throw InputError("ensemble size p must be >= 1");
  PolicyEnsemble ensemble;
  ensemble.meta = MetaFor(config);
  ensemble.meta.master_seed = master_seed;
  ensemble.meta.env = dataset.meta().env;
  ensemble.meta.feature_map = shape.features.Id();
  for (int i = 0; i < p; ++i) {
    ensemble.meta.seeds.push_back(DeriveSeed(master_seed, i));
  }

  std::vector<std::optional<LinearQ>> slots(p);
  auto train_one = [&](int i) {
    Rng rng(ensemble.meta.seeds[i]);
    slots[i] = std::visit(
        [&](const auto& c) -> LinearQ {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, SgmConfig>) {
            return SgmTrain(dataset, shape, c, rng);
          } else {
            return DpFedAvgTrain(dataset, shape, c, rng);
          }
        },
        config);
  };

  const int workers = std::clamp(threads, 1, p);
  if (workers == 1) {
    for (int i = 0; i < p; ++i) train_one(i);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
          for (int i = next++; i < p; i = next++) {
            try {
              train_one(i);
            } catch (...) {
              std::lock_guard lock(failure_mu);
              if (!failure) failure = std::current_exception();
            }
          }
        });
      }
    }
    if (failure) std::rethrow_exception(failure);
  }
  for (auto& slot : slots) ensemble.instances.push_back(std::move(*slot));
  return ensemble;
}

}  // namespace dpcert
