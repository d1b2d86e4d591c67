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

// Action-level certification: ensemble votes, simultaneous Clopper-Pearson
// bounds on the inferred scores, the separation predicate over a K family,
// and the largest certified poisoning radius per visited state.

#ifndef DPCERT_CERT_ACTION_H_
#define DPCERT_CERT_ACTION_H_

#include <span>
#include <string>
#include <vector>

#include "dpcert/accountant.h"
#include "dpcert/mdp.h"
#include "dpcert/train.h"

namespace dpcert {

struct VoteCounts {
  std::vector<int> counts;  // per action
  int total = 0;            // p

  // First action with the maximal count.
  int TopAction() const;
};

// Counts of each instance's greedy action at `state`.
VoteCounts Vote(const PolicyEnsemble& ensemble, int state);

struct ScoreBounds {
  int top_action = 0;
  double lower_top = 0.0;
  // Upper bounds for every action other than top_action, in action order.
  std::vector<int> other_actions;
  std::vector<double> upper_others;

  double MaxUpper() const;
};

// Lower bound Beta(alpha/L; n_top, p - n_top + 1) for the top action and
// upper bounds Beta(1 - alpha/L; n_i + 1, p - n_i) for the others, jointly
// valid with probability >= 1 - alpha_conf.
ScoreBounds SimuEmBounds(const VoteCounts& votes, double alpha_conf);

// Best members for the separation test, when one exists.
struct Separation {
  bool certified = false;
  double lower_after = 0.0;   // max over K1 of K1^-1(lower_top)
  double upper_after = 1.0;   // min over K2 of max_i K2(upper_i)
};

// K1 and K2 are searched independently over the family.
Separation SeparationAt(const ScoreBounds& bounds, const KFamily& family);
bool CertifiedAt(const ScoreBounds& bounds, const KFamily& family);

// Largest r in [0, r_max] certified at radius r, found by binary search
// (certification only weakens as r grows). 0 when r = 1 already fails.
int MaxTolerableRadius(const ScoreBounds& bounds, const RdpCurve& composed,
                       int r_max, const std::vector<double>& delta_grid,
                       GuaranteeKind kind);
int MaxTolerableRadius(const ScoreBounds& bounds, const TrainingMeta& meta,
                       int r_max, const std::vector<double>& delta_grid,
                       GuaranteeKind kind);

struct RadiusRecord {
  int episode = 0;
  int t = 0;
  int state = 0;
  int radius = 0;
  GuaranteeKind kind = GuaranteeKind::kRdp;
  int action = 0;

  friend bool operator==(const RadiusRecord&, const RadiusRecord&) = default;
};

struct ActionCertOptions {
  double alpha_conf = 0.001;
  int r_max = 512;
  std::vector<double> delta_grid = DefaultDeltaGrid();
};

// Plays one episode with the voted action and records r_t for both kinds
// at every visited state.
std::vector<RadiusRecord> CertifyEpisode(const PolicyEnsemble& ensemble,
                                         const GridWorldConfig& env, Rng& rng,
                                         const ActionCertOptions& options,
                                         int episode = 0);

// Fraction of radii >= threshold.
double StabilityRatio(std::span<const int> radii, int threshold);

// CSV with header episode,t,state,r_t,kind,alpha_conf,r_max.
std::string RadiusCsv(const std::vector<RadiusRecord>& records,
                      const ActionCertOptions& options);

}  // namespace dpcert

#endif  // DPCERT_CERT_ACTION_H_
