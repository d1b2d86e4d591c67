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

// Policy-level certification: a DKW confidence lower bound on the clean
// expected return, mapped through the expected-outcome inequalities to a
// lower bound on the return after poisoning of size r.

#ifndef DPCERT_CERT_POLICY_H_
#define DPCERT_CERT_POLICY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dpcert/accountant.h"
#include "dpcert/mdp.h"
#include "dpcert/train.h"

namespace dpcert {

// Sorted cumulative-reward samples on a known range [lower, upper].
class EmpiricalCdf {
 public:
  // Throws InputError when empty, lower > upper, or a sample is outside
  // the range.
  EmpiricalCdf(std::vector<double> samples, double lower, double upper);

  const std::vector<double>& samples() const { return samples_; }
  int size() const { return static_cast<int>(samples_.size()); }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double Mean() const;
  // F_hat(x) = #{X_i <= x} / m.
  double operator()(double x) const;

 private:
  std::vector<double> samples_;
  double lower_;
  double upper_;
};

// sqrt(ln(2 / delta) / (2 m)).
double DkwEpsilon(int m, double confidence_delta);

// Lower confidence bound on E[max(X, 0)]:
//   int_0^upper clamp(1 - F_hat(x) - eps, 0, 1) dx,
// evaluated exactly over the step function.
double PositivePartLower(const EmpiricalCdf& cdf, double eps_dkw);

// Upper confidence bound on E[max(-X, 0)]:
//   int_lower^0 clamp(F_hat(u) + eps, 0, 1) du.
double NegativePartUpper(const EmpiricalCdf& cdf, double eps_dkw);

// Lower confidence bound on E[X] for X in [0, b]. Requires cdf.lower() >= 0.
double JLowerClean(const EmpiricalCdf& cdf, double eps_dkw);

// max(0, e^-eps (J - b delta)).
double CertifyPolicyAdp(double j_lower, double b, double eps, double delta);
// e^-eps (b^(-1/alpha) J)^(alpha/(alpha-1)).
double CertifyPolicyRdp(double j_lower, double b, double eps, double alpha);

// Rewards in [a, b] with a < 0 < b. Not clamped; the bound may be negative.
//   ADP: e^-eps (J+ - b delta) - (e^eps J- - a delta)
//   RDP: e^-eps (b^(-1/alpha) J+)^(alpha/(alpha-1))
//          - (-a)^(1/alpha) (e^eps J-)^((alpha-1)/alpha)
double CertifyPolicyReal(double j_plus_lower, double j_minus_upper, double a,
                         double b, const AdpPoint& member);
double CertifyPolicyReal(double j_plus_lower, double j_minus_upper, double a,
                         double b, const RdpPoint& member);

struct PolicyCertRow {
  int radius = 0;
  std::string kind;  // "adp" | "rdp"
  double j_lower_clean = 0.0;
  double j_certified = 0.0;
  // Parameters of the best member; eps = kNoGuarantee when the family is
  // empty at this radius (then j_certified is the trivial bound).
  double eps = 0.0;
  double alpha_or_delta = 0.0;
  bool guaranteed = true;
  double delta_conf = 0.0;
  int m = 0;
};

struct PolicyCertOptions {
  int rollouts_per_instance = 10;
  std::vector<int> radii = {0, 1, 2, 5, 10, 20, 50, 100, 200};
  double delta_conf = 0.001;
  std::vector<double> delta_grid = DefaultDeltaGrid();
  std::uint64_t seed = 0;
};

// m = p * rollouts_per_instance cumulative rewards of the ensemble's greedy
// policies, cycling the instances round-robin; rollout j uses environment
// stream DeriveSeed(seed, j).
std::vector<double> CollectReturns(const PolicyEnsemble& ensemble,
                                   const GridWorldConfig& env,
                                   int rollouts_per_instance,
                                   std::uint64_t seed);

// Certified curve from return samples on [a, b] and the trainer's meta.
// Uses the nonnegative-reward theorem when a >= 0 and the real-valued one
// otherwise. Throws NumericError if the result is not non-increasing in r.
std::vector<PolicyCertRow> PolicyCertFromReturns(
    const std::vector<double>& returns, double a, double b,
    const TrainingMeta& meta, const PolicyCertOptions& options);

std::vector<PolicyCertRow> PolicyCertCurve(const PolicyEnsemble& ensemble,
                                           const GridWorldConfig& env,
                                           const PolicyCertOptions& options);

// CSV with header r,kind,J_lower_clean,J_certified,eps,alpha_or_delta,
// delta_conf,m.
std::string PolicyCertCsv(const std::vector<PolicyCertRow>& rows);

}  // namespace dpcert

#endif  // DPCERT_CERT_POLICY_H_
