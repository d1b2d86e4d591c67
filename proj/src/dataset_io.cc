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

#include "dpcert/dataset_io.h"

#include <fstream>
#include <iostream>
#include <sstream>

#include "dpcert/errors.h"
#include "json.hpp"

namespace dpcert {
namespace {

using Json = nlohmann::ordered_json;

Json StateToJson(int cell, const std::vector<double>& vec) {
  if (!vec.empty()) return Json(vec);
  return Json(cell);
}

void StateFromJson(const Json& j, int& cell, std::vector<double>& vec) {
  if (j.is_number_integer()) {
    cell = j.get<int>();
    vec.clear();
  } else if (j.is_array()) {
    cell = -1;
    vec = j.get<std::vector<double>>();
  } else {
    throw InputError("state must be an integer or an array of reals");
  }
}

}  // namespace

void WriteDatasetJsonl(const Dataset& dataset, std::ostream& out) {
  const DatasetMeta& meta = dataset.meta();
  Json header;
  header["env"] = meta.env;
  header["H"] = meta.horizon;
  header["gamma"] = meta.gamma;
  header["a"] = meta.reward_min;
  header["b"] = meta.reward_max;
  header["M"] = dataset.num_trajectories();
  header["N"] = dataset.num_transitions();
  if (!meta.attack.empty()) header["attack"] = Json::parse(meta.attack);
  if (!meta.config_hash.empty()) header["config_hash"] = meta.config_hash;
  out << header.dump() << '\n';

  for (const Trajectory& traj : dataset.trajectories()) {
    for (const Transition& step : traj.steps) {
      Json line;
      line["traj"] = step.traj_id;
      line["t"] = step.t;
      line["s"] = StateToJson(step.state, step.state_vec);
      line["a"] = step.action;
      line["r"] = step.reward;
      line["s2"] = StateToJson(step.next_state, step.next_state_vec);
      line["done"] = step.done;
      out << line.dump() << '\n';
    }
  }
}

std::string DatasetToJsonl(const Dataset& dataset) {
  std::ostringstream os;
  WriteDatasetJsonl(dataset, os);
  return os.str();
}

Dataset ReadDatasetJsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("dataset file is empty");
  DatasetMeta meta;
  int expected_m = 0;
  int expected_n = 0;
  try {
    const Json header = Json::parse(line);
    meta.env = header.at("env").get<std::string>();
    meta.horizon = header.at("H").get<int>();
    meta.gamma = header.at("gamma").get<double>();
    meta.reward_min = header.at("a").get<double>();
    meta.reward_max = header.at("b").get<double>();
    expected_m = header.at("M").get<int>();
    expected_n = header.at("N").get<int>();
    if (header.contains("attack")) meta.attack = header["attack"].dump();
    if (header.contains("config_hash")) {
      meta.config_hash = header["config_hash"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed dataset header: ") + e.what());
  }

  std::vector<Trajectory> trajectories;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Transition step;
    try {
      const Json j = Json::parse(line);
      step.traj_id = j.at("traj").get<int>();
      step.t = j.at("t").get<int>();
      StateFromJson(j.at("s"), step.state, step.state_vec);
      step.action = j.at("a").get<int>();
      step.reward = j.at("r").get<double>();
      StateFromJson(j.at("s2"), step.next_state, step.next_state_vec);
      step.done = j.at("done").get<bool>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed transition on line " +
                       std::to_string(line_no) + ": " + e.what());
    }
    if (trajectories.empty() || trajectories.back().traj_id != step.traj_id) {
      trajectories.push_back(Trajectory{.traj_id = step.traj_id, .steps = {}});
    }
    trajectories.back().steps.push_back(std::move(step));
  }

  Dataset dataset(std::move(meta), std::move(trajectories));
  if (dataset.num_trajectories() != expected_m ||
      dataset.num_transitions() != expected_n) {
    throw InputError("dataset header M/N disagree with the body");
  }
  dataset.Validate();
  return dataset;
}

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path) {
  WriteFileAtomic(path, DatasetToJsonl(dataset));
}

Dataset LoadDataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open dataset " + path.string());
  return ReadDatasetJsonl(in);
}

void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << contents;
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace dpcert
