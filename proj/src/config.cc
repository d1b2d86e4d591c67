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

#include "dpcert/config.h"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "dpcert/dataset_io.h"
#include "dpcert/errors.h"
#include "dpcert/rng.h"

namespace dpcert {
namespace {

using Json = nlohmann::json;

// Objects whose keys are user data rather than schema.
bool IsFreeMap(const std::string& pointer) {
  return pointer == "/env/goal_cells" || pointer == "/env/pit_cells";
}

void CheckKnownKeys(const Json& doc, const Json& schema,
                    const std::string& pointer) {
  if (!doc.is_object() || !schema.is_object() || IsFreeMap(pointer)) return;
  for (const auto& [key, value] : doc.items()) {
    if (!schema.contains(key)) {
      throw ConfigError("unknown config key '" + pointer + "/" + key + "'");
    }
    CheckKnownKeys(value, schema[key], pointer + "/" + key);
  }
}

template <typename T>
T Get(const Json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad value for " + where + "." + key + ": " + e.what());
  }
}

std::map<int, double> CellMap(const Json& j, const std::string& where) {
  std::map<int, double> cells;
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    try {
      cells[std::stoi(key)] = value.get<double>();
    } catch (const std::exception&) {
      throw ConfigError(where + " entries must map cell index to reward");
    }
  }
  return cells;
}

AttackSpec ParseAttack(const Json& j, std::size_t index) {
  const std::string where = "attack[" + std::to_string(index) + "]";
  static const Json kKeys = {{"kind", 0}, {"budget", 0}, {"selection", 0},
                             {"mode", 0}, {"seed", 0},   {"level", 0}};
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  CheckKnownKeys(j, kKeys, "/" + where);
  AttackSpec spec;
  spec.kind = AttackKindFromString(Get<std::string>(j, "kind", where));
  spec.budget = Get<int>(j, "budget", where);
  spec.level = spec.kind == AttackKind::kTransitionFlip
                   ? PrivacyLevel::kTransition
                   : PrivacyLevel::kTrajectory;
  if (j.contains("level") &&
      PrivacyLevelFromString(Get<std::string>(j, "level", where)) !=
          spec.level) {
    throw ConfigError(where + ".level does not match the attack kind");
  }
  spec.selection = SelectionModeFromString(
      j.value("selection", std::string("targeted")));
  spec.flip_mode = FlipModeFromString(j.value("mode", std::string("reward")));
  spec.seed = j.value("seed", std::uint64_t{0});
  if (spec.budget < 0) throw ConfigError(where + ".budget must be >= 0");
  return spec;
}

void SetPath(Json& doc, const std::string& dotted, const std::string& raw) {
  std::string pointer;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    pointer += "/" + dotted.substr(start, dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  const Json::json_pointer ptr(pointer);
  const std::string parent = ptr.parent_pointer().to_string();
  if (!doc.contains(ptr) && !IsFreeMap(parent)) {
    throw ConfigError("unknown config key '" + dotted + "'");
  }
  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;
  }
  doc[ptr] = value;
}

}  // namespace

TrainerConfig TrainBlock::Resolve(const Dataset& dataset) const {
  const int units = level == PrivacyLevel::kTransition
                        ? dataset.num_transitions()
                        : dataset.num_trajectories();
  const double rate =
      q > 0.0 ? q : std::min(1.0, static_cast<double>(expected_batch) / units);
  if (level == PrivacyLevel::kTransition) {
    SgmConfig c = sgm;
    c.sample_rate = rate;
    c.Validate();
    return c;
  }
  FedAvgConfig c = fedavg;
  c.sample_rate = rate;
  c.trajectory_count = dataset.num_trajectories();
  c.Validate();
  return c;
}

Json DefaultConfigJson() {
  return Json::parse(R"({
    "env": {
      "name": "gridworld", "width": 4, "height": 4, "start_cell": 0,
      "goal_cells": {"15": 1.0}, "pit_cells": {"5": 0.0},
      "step_reward": 0.0, "slip_prob": 0.1, "horizon": 16, "discount": 0.95
    },
    "data": {"M": 2000, "behavior_epsilon": 0.3, "seed": 1},
    "train": {
      "level": "transition", "p": 50, "seed": 7, "threads": 1,
      "q": 0.0, "expected_batch": 32,
      "sigma": 2.0, "C": 1.0, "T": 2000, "eta": 0.05, "target_refresh": 100,
      "local_epochs": 1, "batch_size": 32
    },
    "certify": {
      "delta_conf": 0.001, "alpha_conf": 0.001,
      "delta_grid": [1e-5, 1e-4, 1e-3],
      "r_range": [0, 1, 2, 5, 10, 20, 50, 100, 200],
      "r_max": 512, "rollouts_per_instance": 10, "episodes": 5,
      "stability_thresholds": [0, 1, 2, 3, 4, 5, 10, 20, 50, 100, 200, 512],
      "seed": 11
    },
    "attack": [
      {"kind": "adversarial_reward", "budget": 5, "selection": "targeted", "seed": 3},
      {"kind": "adversarial_reward", "budget": 10, "selection": "targeted", "seed": 4}
    ],
    "soundness": {"trials": 20, "p": 20, "rollouts_per_instance": 10},
    "output": "out"
  })");
}

ExperimentConfig BuildConfig(
    const Json& document,
    const std::vector<std::pair<std::string, std::string>>& overrides,
    std::optional<std::uint64_t> seed) {
  if (!document.is_object()) throw ConfigError("config must be a JSON object");
  const Json defaults = DefaultConfigJson();
  CheckKnownKeys(document, defaults, "");
  Json doc = defaults;
  doc.merge_patch(document);
  // merge_patch merges maps key-wise; user maps replace the default cells.
  for (const char* key : {"goal_cells", "pit_cells"}) {
    if (document.contains("env") && document["env"].contains(key)) {
      doc["env"][key] = document["env"][key];
    }
  }
  for (const auto& [path, value] : overrides) SetPath(doc, path, value);
  if (seed) {
    doc["data"]["seed"] = *seed;
    doc["train"]["seed"] = DeriveSeed(*seed, 1);
    doc["certify"]["seed"] = DeriveSeed(*seed, 2);
    for (std::size_t i = 0; i < doc["attack"].size(); ++i) {
      doc["attack"][i]["seed"] = DeriveSeed(*seed, 100 + i);
    }
  }

  ExperimentConfig config;
  const Json& env = doc["env"];
  config.env.name = Get<std::string>(env, "name", "env");
  config.env.width = Get<int>(env, "width", "env");
  config.env.height = Get<int>(env, "height", "env");
  config.env.start_cell = Get<int>(env, "start_cell", "env");
  config.env.goal_cells = CellMap(env["goal_cells"], "env.goal_cells");
  config.env.pit_cells = CellMap(env["pit_cells"], "env.pit_cells");
  config.env.step_reward = Get<double>(env, "step_reward", "env");
  config.env.slip_prob = Get<double>(env, "slip_prob", "env");
  config.env.horizon = Get<int>(env, "horizon", "env");
  config.env.discount = Get<double>(env, "discount", "env");
  config.env.Validate();

  const Json& data = doc["data"];
  config.data.num_trajectories = Get<int>(data, "M", "data");
  config.data.behavior.epsilon = Get<double>(data, "behavior_epsilon", "data");
  config.data.seed = Get<std::uint64_t>(data, "seed", "data");
  if (config.data.num_trajectories < 1) throw ConfigError("data.M must be >= 1");
  if (!(config.data.behavior.epsilon >= 0 && config.data.behavior.epsilon <= 1)) {
    throw ConfigError("data.behavior_epsilon must lie in [0, 1]");
  }

  const Json& train = doc["train"];
  TrainBlock& tb = config.train;
  tb.level = PrivacyLevelFromString(Get<std::string>(train, "level", "train"));
  tb.p = Get<int>(train, "p", "train");
  tb.seed = Get<std::uint64_t>(train, "seed", "train");
  tb.threads = Get<int>(train, "threads", "train");
  tb.q = Get<double>(train, "q", "train");
  tb.expected_batch = Get<int>(train, "expected_batch", "train");
  if (tb.p < 1) throw ConfigError("train.p must be >= 1");
  if (tb.q < 0.0 || tb.q > 1.0) throw ConfigError("train.q must lie in [0, 1]");
  if (tb.q == 0.0 && tb.expected_batch < 1) {
    throw ConfigError("train.expected_batch must be >= 1 when q is unset");
  }
  tb.sgm = SgmConfig{.sample_rate = tb.q > 0.0 ? tb.q : 1.0,
                     .noise_multiplier = Get<double>(train, "sigma", "train"),
                     .clip_norm = Get<double>(train, "C", "train"),
                     .iterations = Get<int>(train, "T", "train"),
                     .learning_rate = Get<double>(train, "eta", "train"),
                     .gamma = config.env.discount,
                     .target_refresh = Get<int>(train, "target_refresh", "train")};
  tb.fedavg = FedAvgConfig{.sample_rate = tb.sgm.sample_rate,
                           .noise_multiplier = tb.sgm.noise_multiplier,
                           .clip_norm = tb.sgm.clip_norm,
                           .local_epochs = Get<int>(train, "local_epochs", "train"),
                           .batch_size = Get<int>(train, "batch_size", "train"),
                           .learning_rate = tb.sgm.learning_rate,
                           .iterations = tb.sgm.iterations,
                           .gamma = config.env.discount,
                           .target_refresh = tb.sgm.target_refresh,
                           .trajectory_count = 0};
  tb.sgm.Validate();
  tb.fedavg.Validate();

  const Json& cert = doc["certify"];
  CertifyBlock& cb = config.certify;
  cb.delta_conf = Get<double>(cert, "delta_conf", "certify");
  cb.alpha_conf = Get<double>(cert, "alpha_conf", "certify");
  cb.delta_grid = Get<std::vector<double>>(cert, "delta_grid", "certify");
  cb.r_range = Get<std::vector<int>>(cert, "r_range", "certify");
  cb.r_max = Get<int>(cert, "r_max", "certify");
  cb.rollouts_per_instance = Get<int>(cert, "rollouts_per_instance", "certify");
  cb.episodes = Get<int>(cert, "episodes", "certify");
  cb.stability_thresholds =
      Get<std::vector<int>>(cert, "stability_thresholds", "certify");
  cb.seed = Get<std::uint64_t>(cert, "seed", "certify");
  if (!(cb.delta_conf > 0 && cb.delta_conf < 1)) {
    throw ConfigError("certify.delta_conf must lie in (0, 1)");
  }
  if (!(cb.alpha_conf > 0 && cb.alpha_conf < 1)) {
    throw ConfigError("certify.alpha_conf must lie in (0, 1)");
  }
  for (double d : cb.delta_grid) {
    if (!(d > 0 && d < 1)) throw ConfigError("delta_grid entries in (0, 1)");
  }
  for (int r : cb.r_range) {
    if (r < 0) throw ConfigError("certify.r_range entries must be >= 0");
  }
  if (cb.r_max < 1) throw ConfigError("certify.r_max must be >= 1");
  if (cb.rollouts_per_instance < 1 || cb.episodes < 1) {
    throw ConfigError("certify rollouts and episodes must be >= 1");
  }

  if (!doc["attack"].is_array()) throw ConfigError("attack must be a list");
  for (std::size_t i = 0; i < doc["attack"].size(); ++i) {
    config.attacks.push_back(ParseAttack(doc["attack"][i], i));
  }

  const Json& sound = doc["soundness"];
  config.soundness.trials = Get<int>(sound, "trials", "soundness");
  config.soundness.p = Get<int>(sound, "p", "soundness");
  config.soundness.rollouts_per_instance =
      Get<int>(sound, "rollouts_per_instance", "soundness");
  if (config.soundness.trials < 1 || config.soundness.p < 1 ||
      config.soundness.rollouts_per_instance < 1) {
    throw ConfigError("soundness trials, p and rollouts must be >= 1");
  }

  config.output = Get<std::string>(doc, "output", "config");
  Json hashed = doc;
  hashed.erase("output");
  config.hash = Fnv1aHex(hashed.dump());
  config.source = std::move(doc);
  return config;
}

ExperimentConfig LoadConfig(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& overrides,
    std::optional<std::uint64_t> seed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return BuildConfig(doc, overrides, seed);
}

std::string Fnv1aHex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dpcert
