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

// Deterministic SVG line charts rendered from the report CSVs.

#ifndef DPCERT_PLOT_H_
#define DPCERT_PLOT_H_

#include <string>

namespace dpcert {

enum class PlotKind {
  kPolicyCurve,  // r against J_certified, one line per guarantee kind
  kStability,    // threshold against stability ratio, step lines per kind
};

std::string ToString(PlotKind kind);
PlotKind PlotKindFromString(const std::string& name);

// Header of the stability table consumed by kStability plots.
std::string StabilityCsvHeader();

// Renders `csv_text` as an SVG document. Identical input yields identical
// bytes. Throws InputError when the header does not match `kind`.
std::string EmitPlot(const std::string& csv_text, PlotKind kind);

}  // namespace dpcert

#endif  // DPCERT_PLOT_H_
