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

#ifndef DPCERT_ERRORS_H_
#define DPCERT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpcert {

// Process exit codes; each error class below maps to exactly one.
enum class ExitCode : int {
  kOk = 0,
  kConfig = 2,
  kInput = 3,
  kNumeric = 4,
  kAssertion = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Malformed or inconsistent configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ExitCode::kConfig, what) {}
};

// Argument outside an operation's domain, missing or malformed input files.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what)
      : Error(ExitCode::kInput, what) {}
};

// Iteration caps hit, non-finite results, violated numeric invariants.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ExitCode::kNumeric, what) {}
};

// An empirical validation check (eval-soundness) failed.
class AssertionFailure : public Error {
 public:
  explicit AssertionFailure(const std::string& what)
      : Error(ExitCode::kAssertion, what) {}
};

}  // namespace dpcert

#endif  // DPCERT_ERRORS_H_
