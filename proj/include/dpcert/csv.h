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

// Minimal CSV helpers shared by the report writers and readers.

#ifndef DPCERT_CSV_H_
#define DPCERT_CSV_H_

#include <string>
#include <vector>

namespace dpcert {

// Shortest round-trip decimal form; "inf", "-inf" and "nan" for
// non-finite values.
std::string FormatReal(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws InputError when missing.
  int Column(const std::string& name) const;
};

// Comma-separated, no quoting. Throws InputError on ragged rows.
CsvTable ParseCsv(const std::string& text);

double ParseReal(const std::string& field);

}  // namespace dpcert

#endif  // DPCERT_CSV_H_
