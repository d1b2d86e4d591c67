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

// Command-line entry point: dpcert <subcommand> --config <path> [--out <dir>]
// [--seed <n>] [--<dotted.key>=<value> ...]

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpcert/config.h"
#include "dpcert/errors.h"
#include "dpcert/pipeline.h"
#include "json.hpp"

namespace {

using dpcert::ConfigError;
using dpcert::ExitCode;

struct Args {
  std::string subcommand;
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool help = false;
};

void PrintUsage(std::ostream& os) {
  os << "usage: dpcert <subcommand> --config <path> [--out <dir>] "
        "[--seed <n>] [--<dotted.key>=<value> ...]\n"
        "subcommands:";
  for (const std::string& name : dpcert::StageNames()) os << ' ' << name;
  os << "\n";
}

std::uint64_t ParseSeed(const std::string& text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("--seed expects a non-negative integer, got '" + text +
                      "'");
  }
  return value;
}

Args ParseArgs(int argc, char** argv) {
  Args args;
  std::vector<std::string> tokens(argv + 1, argv + argc);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& token = tokens[i];
    if (token == "-h" || token == "--help") {
      args.help = true;
      continue;
    }
    if (token.rfind("--", 0) != 0) {
      if (!args.subcommand.empty()) {
        throw ConfigError("unexpected argument '" + token + "'");
      }
      args.subcommand = token;
      continue;
    }
    std::string key = token.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else if (i + 1 < tokens.size()) {
      value = tokens[++i];
    } else {
      throw ConfigError("flag --" + key + " needs a value");
    }
    if (key == "config") {
      args.config = value;
    } else if (key == "out") {
      args.out = value;
    } else if (key == "seed") {
      args.seed = ParseSeed(value);
    } else {
      args.overrides.emplace_back(key, value);
    }
  }
  return args;
}

const char* KindName(ExitCode code) {
  switch (code) {
    case ExitCode::kOk:
      return "ok";
    case ExitCode::kConfig:
      return "config";
    case ExitCode::kInput:
      return "input";
    case ExitCode::kNumeric:
      return "numeric";
    case ExitCode::kAssertion:
      return "assertion";
  }
  return "unknown";
}

int Fail(ExitCode code, const std::string& message) {
  nlohmann::ordered_json line;
  line["error"] = KindName(code);
  line["exit_code"] = static_cast<int>(code);
  line["message"] = message;
  std::cerr << line.dump() << std::endl;
  return static_cast<int>(code);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const Args args = ParseArgs(argc, argv);
    if (args.help) {
      PrintUsage(std::cout);
      return 0;
    }
    if (args.subcommand.empty()) {
      PrintUsage(std::cerr);
      throw ConfigError("missing subcommand");
    }
    const auto& names = dpcert::StageNames();
    if (std::find(names.begin(), names.end(), args.subcommand) == names.end()) {
      throw ConfigError("unknown subcommand '" + args.subcommand + "'");
    }
    if (args.config.empty()) throw ConfigError("--config is required");
    const dpcert::ExperimentConfig config =
        dpcert::LoadConfig(args.config, args.overrides, args.seed);
    const std::filesystem::path out =
        args.out ? std::filesystem::path(*args.out) : config.output;
    dpcert::RunStage(args.subcommand, config, out, std::cout);
    return 0;
  } catch (const dpcert::Error& e) {
    return Fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return Fail(ExitCode::kNumeric, e.what());
  }
}
