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

#include "dpcert/accountant.h"

#include "dpcert/errors.h"

namespace dpcert {
namespace {

double LogAddExp(double a, double b) {
  if (a == -kNoGuarantee) return b;
  if (b == -kNoGuarantee) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

int CeilLog2(int r) {
  int c = 0;
  while ((1 << c) < r) ++c;
  return c;
}

}  // namespace

const std::vector<int>& DefaultOrders() {
  static const std::vector<int> orders = [] {
    std::vector<int> o;
    for (int a = 2; a <= 256; ++a) o.push_back(a);
    for (int a = 512; a <= 4096; a *= 2) o.push_back(a);
    return o;
  }();
  return orders;
}

double RdpSgmStep(double q, double sigma, int alpha) {
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("q must lie in [0, 1]");
  if (!(sigma >= 0.0)) throw InputError("sigma must be >= 0");
  if (alpha < 2) throw InputError("RDP order must be an integer >= 2");
  if (q == 0.0) return 0.0;
  if (sigma == 0.0) return kNoGuarantee;

  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  double log_sum = -kNoGuarantee;
  for (int k = 0; k <= alpha; ++k) {
    if (q == 1.0 && k < alpha) continue;
    const double kk = static_cast<double>(k);
    double term = LogBinomial(alpha, k) + kk * log_q +
                  (kk * kk - kk) * inv_two_var;
    if (k < alpha) term += (alpha - kk) * log_1mq;
    log_sum = LogAddExp(log_sum, term);
  }
  return std::max(0.0, log_sum / (alpha - 1.0));
}

RdpCurve SgmStepCurve(double q, double sigma, const std::vector<int>& orders) {
  RdpCurve curve;
  for (int alpha : orders) curve.points[alpha] = RdpSgmStep(q, sigma, alpha);
  return curve;
}

RdpCurve Compose(const RdpCurve& curve, int steps) {
  if (steps < 1) throw InputError("composition needs T >= 1");
  RdpCurve out;
  for (const auto& [alpha, eps] : curve.points) out.points[alpha] = eps * steps;
  return out;
}

RdpCurve RdpGroup(const RdpCurve& curve, int radius) {
  if (radius < 1) throw InputError("group radius must be >= 1");
  const int c = CeilLog2(radius);
  const int divisor = 1 << c;
  const double factor = std::pow(3.0, c);
  RdpCurve out;
  for (const auto& [alpha, eps] : curve.points) {
    if (alpha % divisor != 0 || alpha / divisor < 2) continue;
    out.points[alpha / divisor] = factor * eps;
  }
  return out;
}

std::optional<AdpPoint> RdpToAdp(const RdpCurve& curve, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InputError("delta must lie in (0, 1)");
  }
  const double log_inv_delta = -std::log(delta);
  double best = kNoGuarantee;
  for (const auto& [alpha, eps] : curve.points) {
    best = std::min(best, eps + log_inv_delta / (alpha - 1.0));
  }
  if (!std::isfinite(best)) return std::nullopt;
  return AdpPoint{best, delta};
}

std::optional<AdpPoint> AdpGroup(const AdpPoint& point, int radius) {
  if (radius < 1) throw InputError("group radius must be >= 1");
  if (!std::isfinite(point.eps)) return std::nullopt;
  if (radius == 1) return point;
  const double multiplier =
      point.eps == 0.0 ? radius
                       : std::expm1(radius * point.eps) / std::expm1(point.eps);
  const AdpPoint out{radius * point.eps, point.delta * multiplier};
  if (!(out.delta < 1.0) || !std::isfinite(out.eps)) return std::nullopt;
  return out;
}

std::string ToString(GuaranteeKind kind) {
  return kind == GuaranteeKind::kAdp ? "adp" : "rdp";
}

GuaranteeKind GuaranteeKindFromString(const std::string& s) {
  if (s == "adp") return GuaranteeKind::kAdp;
  if (s == "rdp") return GuaranteeKind::kRdp;
  throw InputError("unknown guarantee kind '" + s + "'");
}

double KFamily::MinEpsilon() const {
  double best = kNoGuarantee;
  for (const AdpPoint& m : adp) {
    if (kind == GuaranteeKind::kAdp) best = std::min(best, m.eps);
  }
  for (const RdpPoint& m : rdp) {
    if (kind == GuaranteeKind::kRdp) best = std::min(best, m.eps);
  }
  return best;
}

RdpCurve ComposedCurve(const TrainingMeta& meta,
                       const std::vector<int>& orders) {
  return Compose(SgmStepCurve(meta.sample_rate, meta.noise_multiplier, orders),
                 meta.iterations);
}

KFamily FamilyAtRadius(const RdpCurve& composed, int radius,
                       const std::vector<double>& delta_grid,
                       GuaranteeKind kind) {
  KFamily family;
  family.kind = kind;
  family.radius = radius;
  const RdpCurve grouped = RdpGroup(composed, radius);
  if (kind == GuaranteeKind::kRdp) {
    for (const auto& [alpha, eps] : grouped.points) {
      if (std::isfinite(eps)) family.rdp.push_back({alpha, eps});
    }
    return family;
  }

  std::vector<AdpPoint> candidates;
  for (double delta : delta_grid) {
    if (auto base = RdpToAdp(composed, delta)) {
      if (auto g = AdpGroup(*base, radius)) candidates.push_back(*g);
    }
    if (auto g = RdpToAdp(grouped, delta)) candidates.push_back(*g);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const AdpPoint& x, const AdpPoint& y) {
              return x.eps != y.eps ? x.eps < y.eps : x.delta < y.delta;
            });
  double best_delta = kNoGuarantee;
  for (const AdpPoint& c : candidates) {
    if (c.delta < best_delta) {
      family.adp.push_back(c);
      best_delta = c.delta;
    }
  }
  return family;
}

FamilyPair KFamilyAtRadius(const TrainingMeta& meta, int radius,
                           const std::vector<double>& delta_grid) {
  const RdpCurve composed = ComposedCurve(meta);
  return {FamilyAtRadius(composed, radius, delta_grid, GuaranteeKind::kRdp),
          FamilyAtRadius(composed, radius, delta_grid, GuaranteeKind::kAdp)};
}

}  // namespace dpcert
