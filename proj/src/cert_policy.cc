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

#include "dpcert/cert_policy.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dpcert/csv.h"
#include "dpcert/errors.h"

namespace dpcert {
namespace {

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Slack for the non-increasing check; the curve is built from exact
// closed forms, so anything beyond rounding is a bug.
constexpr double kMonotoneSlack = 1e-12;

}  // namespace

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples, double lower,
                           double upper)
    : samples_(std::move(samples)), lower_(lower), upper_(upper) {
  if (samples_.empty()) throw InputError("empirical CDF needs samples");
  if (!(lower_ <= upper_)) throw InputError("CDF range is empty");
  std::sort(samples_.begin(), samples_.end());
  if (samples_.front() < lower_ || samples_.back() > upper_) {
    throw InputError("sample outside the declared reward range");
  }
}

double EmpiricalCdf::Mean() const {
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) / size();
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / size();
}

double DkwEpsilon(int m, double confidence_delta) {
  if (m < 1) throw InputError("DKW needs m >= 1");
  if (!(confidence_delta > 0.0 && confidence_delta < 1.0)) {
    throw InputError("confidence delta must lie in (0, 1)");
  }
  return std::sqrt(std::log(2.0 / confidence_delta) / (2.0 * m));
}

double PositivePartLower(const EmpiricalCdf& cdf, double eps_dkw) {
  const double m = cdf.size();
  const double b = cdf.upper();
  if (b <= 0.0) return 0.0;
  double total = 0.0;
  double cursor = 0.0;
  int at_or_below = 0;
  for (double x : cdf.samples()) {
    if (x > cursor) {
      total += (x - cursor) * Clamp01(1.0 - at_or_below / m - eps_dkw);
      cursor = x;
    }
    ++at_or_below;
  }
  if (b > cursor) {
    total += (b - cursor) * Clamp01(1.0 - at_or_below / m - eps_dkw);
  }
  return total;
}

double NegativePartUpper(const EmpiricalCdf& cdf, double eps_dkw) {
  const double m = cdf.size();
  const double a = cdf.lower();
  if (a >= 0.0) return 0.0;
  double total = 0.0;
  double cursor = a;
  int at_or_below = 0;
  for (double x : cdf.samples()) {
    if (x >= 0.0) break;
    if (x > cursor) {
      total += (x - cursor) * Clamp01(at_or_below / m + eps_dkw);
      cursor = x;
    }
    ++at_or_below;
  }
  total += (0.0 - cursor) * Clamp01(at_or_below / m + eps_dkw);
  return total;
}

double JLowerClean(const EmpiricalCdf& cdf, double eps_dkw) {
  if (cdf.lower() < 0.0) {
    throw InputError("JLowerClean needs a nonnegative reward range");
  }
  return PositivePartLower(cdf, eps_dkw);
}

double CertifyPolicyAdp(double j_lower, double b, double eps, double delta) {
  return std::max(0.0, std::exp(-eps) * (j_lower - b * delta));
}

double CertifyPolicyRdp(double j_lower, double b, double eps, double alpha) {
  if (!(alpha > 1.0)) throw InputError("RDP order must exceed 1");
  return std::exp(-eps) *
         std::pow(std::pow(b, -1.0 / alpha) * j_lower, alpha / (alpha - 1.0));
}

double CertifyPolicyReal(double j_plus_lower, double j_minus_upper, double a,
                         double b, const AdpPoint& member) {
  return std::exp(-member.eps) * (j_plus_lower - b * member.delta) -
         (std::exp(member.eps) * j_minus_upper - a * member.delta);
}

double CertifyPolicyReal(double j_plus_lower, double j_minus_upper, double a,
                         double b, const RdpPoint& member) {
  const double alpha = member.alpha;
  const double gain =
      std::exp(-member.eps) *
      std::pow(std::pow(b, -1.0 / alpha) * j_plus_lower, alpha / (alpha - 1.0));
  const double loss =
      std::pow(-a, 1.0 / alpha) *
      std::pow(std::exp(member.eps) * j_minus_upper, (alpha - 1.0) / alpha);
  return gain - loss;
}

std::vector<double> CollectReturns(const PolicyEnsemble& ensemble,
                                   const GridWorldConfig& env,
                                   int rollouts_per_instance,
                                   std::uint64_t seed) {
  if (ensemble.instances.empty()) throw InputError("ensemble is empty");
  if (rollouts_per_instance < 1) {
    throw InputError("rollouts_per_instance must be >= 1");
  }
  const int p = ensemble.size();
  const int m = p * rollouts_per_instance;
  std::vector<double> returns;
  returns.reserve(m);
  for (int j = 0; j < m; ++j) {
    const LinearQ& instance = ensemble.instances[j % p];
    const Policy policy = [&instance](int state, Rng&) {
      return instance.GreedyAction(state);
    };
    Rng rng = MakeStream(seed, j);
    returns.push_back(
        CumulativeReward(Rollout(env, policy, rng, env.horizon), env.discount));
  }
  return returns;
}

std::vector<PolicyCertRow> PolicyCertFromReturns(
    const std::vector<double>& returns, double a, double b,
    const TrainingMeta& meta, const PolicyCertOptions& options) {
  const EmpiricalCdf cdf(returns, std::min(a, 0.0), b);
  const int m = cdf.size();
  const double eps_dkw = DkwEpsilon(m, options.delta_conf);
  const bool real_valued = a < 0.0;
  const double j_plus = PositivePartLower(cdf, eps_dkw);
  const double j_minus = real_valued ? NegativePartUpper(cdf, eps_dkw) : 0.0;
  const double j_clean = j_plus - j_minus;
  const double trivial = real_valued ? a : 0.0;

  std::vector<int> radii = options.radii;
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

  const RdpCurve composed = ComposedCurve(meta);
  std::vector<PolicyCertRow> rows;
  for (GuaranteeKind kind : {GuaranteeKind::kAdp, GuaranteeKind::kRdp}) {
    for (int r : radii) {
      if (r < 0) throw InputError("radius must be >= 0");
      PolicyCertRow row{.radius = r,
                        .kind = ToString(kind),
                        .j_lower_clean = j_clean,
                        .j_certified = j_clean,
                        .eps = 0.0,
                        .alpha_or_delta = 0.0,
                        .guaranteed = true,
                        .delta_conf = options.delta_conf,
                        .m = m};
      if (r > 0) {
        const KFamily family =
            FamilyAtRadius(composed, r, options.delta_grid, kind);
        row.j_certified = -kNoGuarantee;
        for (const AdpPoint& k : family.adp) {
          const double v =
              real_valued ? CertifyPolicyReal(j_plus, j_minus, a, b, k)
                          : CertifyPolicyAdp(j_clean, b, k.eps, k.delta);
          if (v > row.j_certified) {
            row.j_certified = v;
            row.eps = k.eps;
            row.alpha_or_delta = k.delta;
          }
        }
        for (const RdpPoint& k : family.rdp) {
          const double v =
              real_valued ? CertifyPolicyReal(j_plus, j_minus, a, b, k)
                          : CertifyPolicyRdp(j_clean, b, k.eps, k.alpha);
          if (v > row.j_certified) {
            row.j_certified = v;
            row.eps = k.eps;
            row.alpha_or_delta = k.alpha;
          }
        }
        if (family.empty()) {
          row.guaranteed = false;
          row.j_certified = trivial;
          row.eps = kNoGuarantee;
          row.alpha_or_delta = NAN;
        }
      }
      if (!rows.empty() && rows.back().kind == row.kind &&
          row.j_certified > rows.back().j_certified + kMonotoneSlack) {
        throw NumericError("certified return increased with the radius at r=" +
                           std::to_string(r));
      }
      if (row.j_certified > j_clean + kMonotoneSlack) {
        throw NumericError("certified return exceeds the clean lower bound");
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<PolicyCertRow> PolicyCertCurve(const PolicyEnsemble& ensemble,
                                           const GridWorldConfig& env,
                                           const PolicyCertOptions& options) {
  const auto [a, b] = env.CumulativeRewardBounds();
  const std::vector<double> returns = CollectReturns(
      ensemble, env, options.rollouts_per_instance, options.seed);
  return PolicyCertFromReturns(returns, a, b, ensemble.meta, options);
}

std::string PolicyCertCsv(const std::vector<PolicyCertRow>& rows) {
  std::ostringstream os;
  os << "r,kind,J_lower_clean,J_certified,eps,alpha_or_delta,delta_conf,m\n";
  for (const PolicyCertRow& row : rows) {
    os << row.radius << ',' << row.kind << ',' << FormatReal(row.j_lower_clean)
       << ',' << FormatReal(row.j_certified) << ',' << FormatReal(row.eps)
       << ',' << FormatReal(row.alpha_or_delta) << ','
       << FormatReal(row.delta_conf) << ',' << row.m << '\n';
  }
  return os.str();
}

}  // namespace dpcert
