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

// Brute-force and Monte-Carlo harnesses shared by the unit tests (small
// sizes) and the acceptance binary (full sizes).

#ifndef DPCERT_TESTS_ORACLES_H_
#define DPCERT_TESTS_ORACLES_H_

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "dpcert/accountant.h"
#include "dpcert/cert_action.h"
#include "dpcert/cert_policy.h"
#include "dpcert/rng.h"

namespace dpcert::oracles {

using Rational = boost::multiprecision::cpp_rational;

// A random distribution over n outcomes with small-denominator weights.
inline std::vector<Rational> RandomDistribution(int n, Rng& rng) {
  std::uniform_int_distribution<int> w(0, 20);
  std::vector<Rational> p(n);
  Rational total = 0;
  for (int i = 0; i < n; ++i) {
    p[i] = w(rng) + (i == 0 ? 1 : 0);
    total += p[i];
  }
  for (Rational& x : p) x /= total;
  return p;
}

inline Rational Expectation(const std::vector<Rational>& p,
                            const std::vector<Rational>& x) {
  Rational e = 0;
  for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * x[i];
  return e;
}

// Smallest delta with P[S] <= e P'[S] + delta for all events S.
inline Rational HockeyStick(const std::vector<Rational>& p,
                            const std::vector<Rational>& q, const Rational& e) {
  Rational d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > e * q[i]) d += p[i] - e * q[i];
  }
  return d;
}

// sum_i p_i^alpha q_i^(1 - alpha) = exp((alpha - 1) D_alpha(p || q)).
inline Rational RenyiMoment(const std::vector<Rational>& p,
                            const std::vector<Rational>& q, int alpha) {
  Rational s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    Rational num = 1, den = 1;
    for (int k = 0; k < alpha; ++k) num *= p[i];
    for (int k = 0; k < alpha - 1; ++k) den *= q[i];
    s += num / den;
  }
  return s;
}

struct PairCheck {
  int pairs = 0;
  int lower_ok = 0;
  int upper_ok = 0;
  int library_ok = 0;  // certificate functions agree with the exact bound
};

// Pairs (P, Q = (1 - lambda) P + lambda R) over outputs in [0, b]. With
// e^eps = E rational, delta is the exact two-sided hockey-stick distance,
// so Pr_P[S] <= E Pr_Q[S] + delta and Pr_Q[S] <= E Pr_P[S] + delta hold for
// every event. Both ADP expectation bounds are then checked exactly.
inline PairCheck CheckLemma1Adp(int pairs, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> size(2, 8), bound(1, 5), lam(1, 9),
      num(0, 12), ratio(0, 3);
  PairCheck out;
  for (int k = 0; k < pairs; ++k) {
    const int n = size(rng);
    const Rational b = bound(rng);
    std::vector<Rational> x(n);
    for (int i = 0; i < n; ++i) x[i] = b * Rational(num(rng), 12);
    const std::vector<Rational> p = RandomDistribution(n, rng);
    const std::vector<Rational> r = RandomDistribution(n, rng);
    const Rational lambda(lam(rng), 10);
    std::vector<Rational> q(n);
    for (int i = 0; i < n; ++i) q[i] = (1 - lambda) * p[i] + lambda * r[i];
    const Rational e = Rational(1) + Rational(ratio(rng), 4);
    const Rational delta = std::max(HockeyStick(p, q, e), HockeyStick(q, p, e));
    const Rational ep = Expectation(p, x), eq = Expectation(q, x);
    ++out.pairs;
    out.lower_ok += eq >= (ep - b * delta) / e;
    out.upper_ok += eq <= e * ep + b * delta;
    const double eps = std::log(static_cast<double>(e));
    const double cert = CertifyPolicyAdp(static_cast<double>(ep),
                                         static_cast<double>(b), eps,
                                         static_cast<double>(delta));
    out.library_ok += cert <= static_cast<double>(eq) * (1 + 1e-12) + 1e-15;
  }
  return out;
}

// As above for RDP: S = max of the two order-alpha Renyi moments is
// exp((alpha - 1) eps), so both bounds reduce to exact rational
// comparisons after raising to integer powers.
inline PairCheck CheckLemma1Rdp(int pairs, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> size(2, 6), bound(1, 4), lam(1, 9),
      num(0, 8), order(2, 5);
  PairCheck out;
  for (int k = 0; k < pairs; ++k) {
    const int n = size(rng);
    const Rational b = bound(rng);
    std::vector<Rational> x(n);
    for (int i = 0; i < n; ++i) x[i] = b * Rational(num(rng), 8);
    std::vector<Rational> p = RandomDistribution(n, rng);
    std::vector<Rational> r = RandomDistribution(n, rng);
    // Full support keeps both divergences finite.
    for (int i = 0; i < n; ++i) {
      p[i] = (p[i] + Rational(1, 10 * n)) / Rational(11, 10);
      r[i] = (r[i] + Rational(1, 10 * n)) / Rational(11, 10);
    }
    const Rational lambda(lam(rng), 10);
    std::vector<Rational> q(n);
    for (int i = 0; i < n; ++i) q[i] = (1 - lambda) * p[i] + lambda * r[i];
    const int alpha = order(rng);
    const Rational s = std::max(RenyiMoment(p, q, alpha), RenyiMoment(q, p, alpha));
    const Rational ep = Expectation(p, x), eq = Expectation(q, x);
    auto pow = [](Rational v, int k) {
      Rational o = 1;
      for (int i = 0; i < k; ++i) o *= v;
      return o;
    };
    ++out.pairs;
    // e^-eps (b^(-1/alpha) E_P)^(alpha/(alpha-1)) <= E_Q, to the power alpha-1.
    out.lower_ok += pow(eq, alpha - 1) * s * b >= pow(ep, alpha);
    // E_Q <= b^(1/alpha) (e^eps E_P)^((alpha-1)/alpha), to the power alpha.
    out.upper_ok += pow(eq, alpha) <= b * s * pow(ep, alpha - 1);
    const double eps = std::log(static_cast<double>(s)) / (alpha - 1);
    const double cert = CertifyPolicyRdp(static_cast<double>(ep),
                                         static_cast<double>(b), eps, alpha);
    out.library_ok += cert <= static_cast<double>(eq) * (1 + 1e-9) + 1e-15;
  }
  return out;
}

// Fraction of repetitions with j_lower_clean <= E[X] for X = b Bernoulli(p).
inline double DkwCoverage(int reps, int m, double delta_conf, double p,
                          double b, std::uint64_t seed) {
  Rng rng(seed);
  std::bernoulli_distribution coin(p);
  const double eps = DkwEpsilon(m, delta_conf);
  int covered = 0;
  for (int k = 0; k < reps; ++k) {
    std::vector<double> xs(m);
    for (double& x : xs) x = coin(rng) ? b : 0.0;
    covered += JLowerClean(EmpiricalCdf(xs, 0.0, b), eps) <= p * b;
  }
  return static_cast<double>(covered) / reps;
}

// Fraction of multinomial vote draws whose simultaneous bounds cover the
// true probabilities of the reported top action and every other action.
inline double ClopperPearsonCoverage(int reps, int p,
                                     const std::vector<double>& probs,
                                     double alpha_conf, std::uint64_t seed) {
  Rng rng(seed);
  std::discrete_distribution<int> draw(probs.begin(), probs.end());
  std::map<std::vector<int>, bool> cache;
  int covered = 0;
  for (int k = 0; k < reps; ++k) {
    VoteCounts votes;
    votes.counts.assign(probs.size(), 0);
    votes.total = p;
    for (int i = 0; i < p; ++i) ++votes.counts[draw(rng)];
    auto it = cache.find(votes.counts);
    if (it == cache.end()) {
      const ScoreBounds bounds = SimuEmBounds(votes, alpha_conf);
      bool ok = bounds.lower_top <= probs[bounds.top_action];
      for (std::size_t j = 0; j < bounds.other_actions.size(); ++j) {
        ok = ok && bounds.upper_others[j] >= probs[bounds.other_actions[j]];
      }
      it = cache.emplace(votes.counts, ok).first;
    }
    covered += it->second;
  }
  return static_cast<double>(covered) / reps;
}

// Largest certified radius by exhaustive scan over [1, r_max].
inline int LinearScanRadius(const ScoreBounds& bounds, const RdpCurve& composed,
                            int r_max, const std::vector<double>& delta_grid,
                            GuaranteeKind kind) {
  int best = 0;
  for (int r = 1; r <= r_max; ++r) {
    if (CertifiedAt(bounds, FamilyAtRadius(composed, r, delta_grid, kind))) {
      best = r;
    }
  }
  return best;
}

struct ScanCheck {
  int combos = 0;
  int agree = 0;
  int nonzero = 0;
};

// Random vote bounds and training metas; binary search against the scan.
inline ScanCheck CheckRadiusSearch(int combos, int r_max, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> log_q(std::log(1e-4), std::log(0.05));
  std::uniform_real_distribution<double> sigma(0.5, 6.0);
  std::uniform_int_distribution<int> steps(1, 3000), voters(10, 400),
      actions(2, 5);
  std::uniform_real_distribution<double> share(0.4, 1.0);
  ScanCheck out;
  for (int k = 0; k < combos; ++k) {
    TrainingMeta meta;
    meta.sample_rate = std::exp(log_q(rng));
    meta.noise_multiplier = sigma(rng);
    meta.iterations = steps(rng);
    const int p = voters(rng), l = actions(rng);
    VoteCounts votes;
    votes.total = p;
    votes.counts.assign(l, 0);
    votes.counts[0] = static_cast<int>(std::round(share(rng) * p));
    std::uniform_int_distribution<int> other(1, l - 1);
    for (int i = votes.counts[0]; i < p; ++i) ++votes.counts[other(rng)];
    const ScoreBounds bounds = SimuEmBounds(votes, 0.001);
    const RdpCurve composed = ComposedCurve(meta);
    const GuaranteeKind kind = k % 2 ? GuaranteeKind::kAdp : GuaranteeKind::kRdp;
    const int fast = MaxTolerableRadius(bounds, composed, r_max,
                                        DefaultDeltaGrid(), kind);
    const int slow =
        LinearScanRadius(bounds, composed, r_max, DefaultDeltaGrid(), kind);
    ++out.combos;
    out.agree += fast == slow;
    out.nonzero += slow > 0;
  }
  return out;
}

// Toy training algorithm: the statistic s(D) = sum of 12 per-transition
// values in {+1/2, 0, -1/2} released as s + N(0, sigma^2); the "policy"
// picks action 0 when the release is positive. Changing one transition
// moves s by at most 1, so the release is exactly (alpha, alpha/(2
// sigma^2))-RDP at every order.
struct ToyParams {
  int transitions = 12;
  double sigma = 4.0;
  int voters = 1000;          // ensemble size p of each certification batch
  int batches = 200;          // independent certification batches
  int fresh_draws = 10000;    // draws per poisoned dataset
  double alpha_conf = 0.001;
  std::uint64_t seed = 2026;
};

struct ToyResult {
  int batches = 0;
  int sound_batches = 0;      // every poisoning within r_t keeps the action
  int min_radius = 0;
  int max_radius = 0;
  int datasets_checked = 0;   // poisoned datasets enumerated over all batches
};

inline RdpCurve ExactGaussianCurve(double sigma) {
  RdpCurve c;
  for (int a : DefaultOrders()) c.points[a] = a / (2 * sigma * sigma);
  return c;
}

// Distinct statistics reachable by changing at most r of the clean values,
// by exhaustive enumeration of all 3^n datasets within Hamming distance r.
inline std::set<int> ReachableHalfSums(const std::vector<int>& clean_halves,
                                       int r, int* enumerated) {
  const int n = static_cast<int>(clean_halves.size());
  std::set<int> sums;
  std::vector<int> current = clean_halves;
  // Odometer over {+1, 0, -1} (values in half units) per transition.
  std::vector<int> digit(n, 0);
  long total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    long c = code;
    int changed = 0, sum = 0;
    for (int i = 0; i < n; ++i) {
      const int v = 1 - static_cast<int>(c % 3);
      c /= 3;
      changed += v != clean_halves[i];
      sum += v;
    }
    if (changed <= r) {
      sums.insert(sum);
      ++*enumerated;
    }
  }
  return sums;
}

inline ToyResult RunSoundnessToy(const ToyParams& params, GuaranteeKind kind) {
  Rng rng(params.seed);
  std::normal_distribution<double> noise(0.0, params.sigma);
  const std::vector<int> clean(params.transitions, 1);  // all +1/2
  const double clean_sum = 0.5 * params.transitions;
  const RdpCurve curve = ExactGaussianCurve(params.sigma);
  std::map<int, std::set<int>> reachable;  // radius -> half sums
  std::map<int, int> enumerated;
  std::map<int, int> fresh_top;            // half sum -> voted action
  ToyResult out;
  out.min_radius = params.transitions;
  for (int batch = 0; batch < params.batches; ++batch) {
    VoteCounts votes;
    votes.counts = {0, 0};
    votes.total = params.voters;
    for (int i = 0; i < params.voters; ++i) {
      ++votes.counts[clean_sum + noise(rng) > 0 ? 0 : 1];
    }
    const ScoreBounds bounds = SimuEmBounds(votes, params.alpha_conf);
    const int radius = MaxTolerableRadius(bounds, curve, params.transitions,
                                          DefaultDeltaGrid(), kind);
    out.min_radius = std::min(out.min_radius, radius);
    out.max_radius = std::max(out.max_radius, radius);
    ++out.batches;
    if (!reachable.contains(radius)) {
      int count = 0;
      reachable[radius] = ReachableHalfSums(clean, radius, &count);
      enumerated[radius] = count;
    }
    out.datasets_checked += enumerated[radius];
    bool sound = true;
    for (int half_sum : reachable[radius]) {
      if (!fresh_top.contains(half_sum)) {
        int zero = 0;
        for (int d = 0; d < params.fresh_draws; ++d) {
          zero += 0.5 * half_sum + noise(rng) > 0;
        }
        fresh_top[half_sum] = 2 * zero > params.fresh_draws ? 0 : 1;
      }
      sound = sound && fresh_top[half_sum] == bounds.top_action;
    }
    out.sound_batches += sound;
  }
  return out;
}

}  // namespace dpcert::oracles

#endif  // DPCERT_TESTS_ORACLES_H_
