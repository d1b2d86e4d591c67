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

// Ensemble persistence: <dir>/manifest.json plus one instance_<i>.json per
// policy holding its flat weight array.

#ifndef DPCERT_ENSEMBLE_IO_H_
#define DPCERT_ENSEMBLE_IO_H_

#include <filesystem>
#include <string>

#include "dpcert/train.h"

namespace dpcert {

void SaveEnsemble(const PolicyEnsemble& ensemble,
                  const std::filesystem::path& dir,
                  const std::string& config_hash = "");

// Returns the ensemble; `config_hash` (when non-null) receives the hash
// recorded in the manifest.
PolicyEnsemble LoadEnsemble(const std::filesystem::path& dir,
                            std::string* config_hash = nullptr);

}  // namespace dpcert

#endif  // DPCERT_ENSEMBLE_IO_H_
