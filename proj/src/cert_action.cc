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

#include "dpcert/cert_action.h"

#include <algorithm>
#include <sstream>

#include "dpcert/csv.h"
#include "dpcert/errors.h"
#include "dpcert/special_functions.h"

namespace dpcert {
namespace {

double Clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

template <typename Member>
Separation Separate(const ScoreBounds& bounds,
                    const std::vector<Member>& members) {
  Separation best;
  best.lower_after = 0.0;
  best.upper_after = 1.0;
  if (members.empty()) return best;
  for (const Member& k : members) {
    best.lower_after =
        std::max(best.lower_after, Clamp01(KInverse(k, bounds.lower_top)));
    double worst = 0.0;
    for (double u : bounds.upper_others) {
      worst = std::max(worst, Clamp01(KApply(k, u)));
    }
    best.upper_after = std::min(best.upper_after, worst);
  }
  best.certified = best.lower_after > best.upper_after;
  return best;
}

}  // namespace

int VoteCounts::TopAction() const {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                          counts.begin());
}

VoteCounts Vote(const PolicyEnsemble& ensemble, int state) {
  if (ensemble.instances.empty()) throw InputError("ensemble is empty");
  VoteCounts votes;
  votes.counts.assign(ensemble.num_actions(), 0);
  for (const LinearQ& instance : ensemble.instances) {
    ++votes.counts[instance.GreedyAction(state)];
  }
  votes.total = ensemble.size();
  return votes;
}

double ScoreBounds::MaxUpper() const {
  return upper_others.empty()
             ? 0.0
             : *std::max_element(upper_others.begin(), upper_others.end());
}

ScoreBounds SimuEmBounds(const VoteCounts& votes, double alpha_conf) {
  if (!(alpha_conf > 0.0 && alpha_conf < 1.0)) {
    throw InputError("alpha_conf must lie in (0, 1)");
  }
  const int num_actions = static_cast<int>(votes.counts.size());
  const int p = votes.total;
  if (num_actions < 1 || p < 1) throw InputError("empty vote counts");
  const double level = alpha_conf / num_actions;

  ScoreBounds bounds;
  bounds.top_action = votes.TopAction();
  const int n_top = votes.counts[bounds.top_action];
  bounds.lower_top =
      n_top == 0 ? 0.0 : BetaQuantile(level, n_top, p - n_top + 1);
  for (int i = 0; i < num_actions; ++i) {
    if (i == bounds.top_action) continue;
    const int n = votes.counts[i];
    bounds.other_actions.push_back(i);
    bounds.upper_others.push_back(
        n == p ? 1.0 : BetaQuantile(1.0 - level, n + 1, p - n));
  }
  return bounds;
}

Separation SeparationAt(const ScoreBounds& bounds, const KFamily& family) {
  return family.kind == GuaranteeKind::kAdp ? Separate(bounds, family.adp)
                                            : Separate(bounds, family.rdp);
}

bool CertifiedAt(const ScoreBounds& bounds, const KFamily& family) {
  return SeparationAt(bounds, family).certified;
}

int MaxTolerableRadius(const ScoreBounds& bounds, const RdpCurve& composed,
                       int r_max, const std::vector<double>& delta_grid,
                       GuaranteeKind kind) {
  if (r_max < 1) throw InputError("r_max must be >= 1");
  auto ok = [&](int r) {
    return CertifiedAt(bounds, FamilyAtRadius(composed, r, delta_grid, kind));
  };
  if (!ok(1)) return 0;
  if (ok(r_max)) return r_max;
  int lo = 1;      // certified
  int hi = r_max;  // not certified
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

int MaxTolerableRadius(const ScoreBounds& bounds, const TrainingMeta& meta,
                       int r_max, const std::vector<double>& delta_grid,
                       GuaranteeKind kind) {
  return MaxTolerableRadius(bounds, ComposedCurve(meta), r_max, delta_grid,
                            kind);
}

std::vector<RadiusRecord> CertifyEpisode(const PolicyEnsemble& ensemble,
                                         const GridWorldConfig& env, Rng& rng,
                                         const ActionCertOptions& options,
                                         int episode) {
  const RdpCurve composed = ComposedCurve(ensemble.meta);
  std::vector<RadiusRecord> records;
  int state = env.start_cell;
  for (int t = 0; t < env.horizon; ++t) {
    const VoteCounts votes = Vote(ensemble, state);
    const ScoreBounds bounds = SimuEmBounds(votes, options.alpha_conf);
    for (GuaranteeKind kind : {GuaranteeKind::kAdp, GuaranteeKind::kRdp}) {
      records.push_back(RadiusRecord{
          .episode = episode,
          .t = t,
          .state = state,
          .radius = MaxTolerableRadius(bounds, composed, options.r_max,
                                       options.delta_grid, kind),
          .kind = kind,
          .action = bounds.top_action});
    }
    const StepResult step = GridWorldStep(state, bounds.top_action, env, rng);
    if (step.done) break;
    state = step.next_state;
  }
  return records;
}

double StabilityRatio(std::span<const int> radii, int threshold) {
  if (radii.empty()) throw InputError("stability ratio needs radii");
  const auto hits = std::count_if(radii.begin(), radii.end(),
                                  [&](int r) { return r >= threshold; });
  return static_cast<double>(hits) / static_cast<double>(radii.size());
}

std::string RadiusCsv(const std::vector<RadiusRecord>& records,
                      const ActionCertOptions& options) {
  std::ostringstream os;
  os << "episode,t,state,r_t,kind,alpha_conf,r_max\n";
  for (const RadiusRecord& r : records) {
    os << r.episode << ',' << r.t << ',' << r.state << ',' << r.radius << ','
       << ToString(r.kind) << ',' << FormatReal(options.alpha_conf) << ','
       << options.r_max << '\n';
  }
  return os.str();
}

}  // namespace dpcert
