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

#include "dpcert/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "dpcert/csv.h"
#include "dpcert/errors.h"

namespace dpcert {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 400;
constexpr double kLeft = 70;
constexpr double kRight = 120;
constexpr double kTop = 30;
constexpr double kBottom = 50;
constexpr int kTicks = 5;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string Fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string Tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 1.0;
};

Range Span(const std::map<std::string, std::vector<std::pair<double, double>>>&
               series,
           bool use_x, Range fallback) {
  bool any = false;
  Range r{std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  for (const auto& [kind, points] : series) {
    for (const auto& [x, y] : points) {
      const double v = use_x ? x : y;
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
      any = true;
    }
  }
  if (!any) return fallback;
  r.lo = std::min(r.lo, fallback.lo);
  r.hi = std::max(r.hi, fallback.hi);
  if (r.hi - r.lo < 1e-12) r.hi = r.lo + 1.0;
  return r;
}

}  // namespace

std::string ToString(PlotKind kind) {
  return kind == PlotKind::kPolicyCurve ? "policy" : "stability";
}

PlotKind PlotKindFromString(const std::string& name) {
  if (name == "policy") return PlotKind::kPolicyCurve;
  if (name == "stability") return PlotKind::kStability;
  throw ConfigError("unknown plot kind '" + name + "'");
}

std::string StabilityCsvHeader() { return "threshold,ratio,kind"; }

std::string EmitPlot(const std::string& csv_text, PlotKind kind) {
  const CsvTable table = ParseCsv(csv_text);
  const bool policy = kind == PlotKind::kPolicyCurve;
  const int xc = table.Column(policy ? "r" : "threshold");
  const int yc = table.Column(policy ? "J_certified" : "ratio");
  const int kc = table.Column("kind");

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& row : table.rows) {
    const double x = ParseReal(row[xc]);
    const double y = ParseReal(row[yc]);
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    series[row[kc]].emplace_back(x, y);
  }
  for (auto& [name, points] : series) {
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  const Range xr = Span(series, true, Range{0.0, policy ? 1.0 : 1.0});
  const Range yr = Span(series, false, Range{0.0, 1.0});
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) {
    return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";
  const double x0 = kLeft, y0 = kTop + ph, x1 = kLeft + pw;
  svg << "<line class=\"axis\" x1=\"" << Fixed(x0) << "\" y1=\"" << Fixed(y0)
      << "\" x2=\"" << Fixed(x1) << "\" y2=\"" << Fixed(y0)
      << "\" stroke=\"black\"/>\n";
  svg << "<line class=\"axis\" x1=\"" << Fixed(x0) << "\" y1=\"" << Fixed(y0)
      << "\" x2=\"" << Fixed(x0) << "\" y2=\"" << Fixed(kTop)
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
    const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
    svg << "<text x=\"" << Fixed(px(fx)) << "\" y=\"" << Fixed(y0 + 16)
        << "\" text-anchor=\"middle\">" << Tick(fx) << "</text>\n";
    svg << "<text x=\"" << Fixed(x0 - 6) << "\" y=\"" << Fixed(py(fy) + 4)
        << "\" text-anchor=\"end\">" << Tick(fy) << "</text>\n";
  }
  svg << "<text class=\"xlabel\" x=\"" << Fixed(kLeft + pw / 2) << "\" y=\""
      << Fixed(kHeight - 12) << "\" text-anchor=\"middle\">"
      << (policy ? "poisoning radius r" : "tolerable poisoning threshold")
      << "</text>\n";
  svg << "<text class=\"ylabel\" x=\"16\" y=\"" << Fixed(kTop + ph / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << Fixed(kTop + ph / 2) << ")\">"
      << (policy ? "certified lower bound J_r" : "stability ratio")
      << "</text>\n";

  int color = 0;
  for (const auto& [name, points] : series) {
    const char* stroke = kColors[color % 4];
    std::ostringstream d;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double sx = px(points[i].first), sy = py(points[i].second);
      if (i == 0) {
        d << "M " << Fixed(sx) << "," << Fixed(sy);
      } else if (policy) {
        d << " L " << Fixed(sx) << "," << Fixed(sy);
      } else {
        d << " L " << Fixed(sx) << "," << Fixed(py(points[i - 1].second))
          << " L " << Fixed(sx) << "," << Fixed(sy);
      }
    }
    svg << "<path class=\"series\" data-kind=\"" << name << "\" d=\""
        << d.str() << "\" fill=\"none\" stroke=\"" << stroke << "\"/>\n";
    const double ly = kTop + 14.0 * (color + 1);
    svg << "<text x=\"" << Fixed(kWidth - kRight + 10) << "\" y=\""
        << Fixed(ly) << "\" fill=\"" << stroke << "\">" << name
        << "</text>\n";
    ++color;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace dpcert
