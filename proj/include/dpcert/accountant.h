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

// Privacy accounting: RDP of the Poisson-subsampled Gaussian mechanism,
// composition, group privacy at radius r, RDP -> ADP conversion, and the
// outcome-guarantee function families K built from them.
//
// An infinite epsilon means "no guarantee". Functions that can lose the
// guarantee entirely return an empty curve or std::nullopt.

#ifndef DPCERT_ACCOUNTANT_H_
#define DPCERT_ACCOUNTANT_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpcert/train.h"

namespace dpcert {

inline constexpr double kNoGuarantee = std::numeric_limits<double>::infinity();

// Integer orders 2..256 followed by powers of two up to 4096.
const std::vector<int>& DefaultOrders();

// Per-step RDP epsilon at integer order alpha of the sampled Gaussian
// mechanism with sampling rate q and noise multiplier sigma:
//   1/(alpha-1) log sum_k C(alpha,k) (1-q)^(alpha-k) q^k exp((k^2-k)/(2 s^2))
// Returns kNoGuarantee when sigma == 0 and q > 0.
double RdpSgmStep(double q, double sigma, int alpha);

struct RdpCurve {
  // order alpha -> epsilon(alpha)
  std::map<int, double> points;

  bool empty() const { return points.empty(); }
  friend bool operator==(const RdpCurve&, const RdpCurve&) = default;
};

RdpCurve SgmStepCurve(double q, double sigma,
                      const std::vector<int>& orders = DefaultOrders());

// Additive composition over T steps.
RdpCurve Compose(const RdpCurve& curve, int steps);

// Group privacy for datasets at distance <= r. With c = ceil(log2 r), each
// order alpha divisible by 2^c with alpha / 2^c >= 2 becomes order
// alpha / 2^c with epsilon 3^c eps(alpha); other orders are dropped.
RdpCurve RdpGroup(const RdpCurve& curve, int radius);

struct AdpPoint {
  double eps = 0.0;
  double delta = 0.0;

  friend bool operator==(const AdpPoint&, const AdpPoint&) = default;
};

// min over orders of eps(alpha) + log(1/delta) / (alpha - 1).
std::optional<AdpPoint> RdpToAdp(const RdpCurve& curve, double delta);

// (r eps, delta (e^{r eps} - 1) / (e^eps - 1)); nullopt once delta >= 1.
std::optional<AdpPoint> AdpGroup(const AdpPoint& point, int radius);

struct RdpPoint {
  int alpha = 2;
  double eps = 0.0;

  friend bool operator==(const RdpPoint&, const RdpPoint&) = default;
};

// K(x) = e^eps x + delta and its inverse max(0, x - delta) e^-eps.
template <typename Scalar>
Scalar KApply(const AdpPoint& k, Scalar x) {
  using std::exp;
  return exp(Scalar(k.eps)) * x + Scalar(k.delta);
}
template <typename Scalar>
Scalar KInverse(const AdpPoint& k, Scalar x) {
  using std::exp;
  using std::max;
  return max(Scalar(0), x - Scalar(k.delta)) * exp(-Scalar(k.eps));
}

// K(x) = (e^eps x)^((alpha-1)/alpha) and its inverse e^-eps x^(alpha/(alpha-1)).
template <typename Scalar>
Scalar KApply(const RdpPoint& k, Scalar x) {
  using std::exp;
  using std::pow;
  const Scalar a(k.alpha);
  return pow(exp(Scalar(k.eps)) * x, (a - 1) / a);
}
template <typename Scalar>
Scalar KInverse(const RdpPoint& k, Scalar x) {
  using std::exp;
  using std::pow;
  const Scalar a(k.alpha);
  return exp(-Scalar(k.eps)) * pow(x, a / (a - 1));
}

enum class GuaranteeKind { kAdp, kRdp };
std::string ToString(GuaranteeKind kind);
GuaranteeKind GuaranteeKindFromString(const std::string& s);

// The K family valid at one radius. Exactly one member vector is used,
// according to `kind`. An empty family certifies nothing.
struct KFamily {
  GuaranteeKind kind = GuaranteeKind::kRdp;
  int radius = 1;
  std::vector<AdpPoint> adp;
  std::vector<RdpPoint> rdp;

  bool empty() const {
    return kind == GuaranteeKind::kAdp ? adp.empty() : rdp.empty();
  }
  // kNoGuarantee when empty.
  double MinEpsilon() const;
};

inline const std::vector<double>& DefaultDeltaGrid() {
  static const std::vector<double> grid = {1e-5, 1e-4, 1e-3};
  return grid;
}

// Composed T-step curve for the trainer described by `meta`.
RdpCurve ComposedCurve(const TrainingMeta& meta,
                       const std::vector<int>& orders = DefaultOrders());

// Family of `kind` at `radius` from an already composed curve.
//   RDP: RdpGroup(composed, r).
//   ADP: for each delta, AdpGroup(RdpToAdp(composed, delta), r) together
//        with RdpToAdp(RdpGroup(composed, r), delta); dominated members
//        (no smaller eps and no smaller delta than another) are dropped.
KFamily FamilyAtRadius(const RdpCurve& composed, int radius,
                       const std::vector<double>& delta_grid,
                       GuaranteeKind kind);

struct FamilyPair {
  KFamily rdp;
  KFamily adp;
};

FamilyPair KFamilyAtRadius(const TrainingMeta& meta, int radius,
                           const std::vector<double>& delta_grid =
                               DefaultDeltaGrid());

}  // namespace dpcert

#endif  // DPCERT_ACCOUNTANT_H_
