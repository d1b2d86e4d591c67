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

// JSON-lines dataset persistence. Line 1 is a meta object with keys
// env, H, gamma, a, b, M, N (then optional attack, config_hash); each
// following line is one transition with keys traj, t, s, a, r, s2, done.

#ifndef DPCERT_DATASET_IO_H_
#define DPCERT_DATASET_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "dpcert/mdp.h"

namespace dpcert {

void WriteDatasetJsonl(const Dataset& dataset, std::ostream& out);
std::string DatasetToJsonl(const Dataset& dataset);

// Throws InputError on malformed lines or when the header counts disagree
// with the body.
Dataset ReadDatasetJsonl(std::istream& in);

void SaveDataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset LoadDataset(const std::filesystem::path& path);

// Writes via a temporary sibling file and rename.
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& contents);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace dpcert

#endif  // DPCERT_DATASET_IO_H_
