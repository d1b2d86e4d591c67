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

#ifndef DPCERT_SPECIAL_FUNCTIONS_H_
#define DPCERT_SPECIAL_FUNCTIONS_H_

namespace dpcert {

// I_x(a, b), the regularized incomplete beta function, by Lentz's
// continued fraction. Throws NumericError if the fraction does not converge.
double RegularizedIncompleteBeta(double x, double a, double b);

// x with I_x(a, b) = prob, by bisection on [0, 1] to an absolute tolerance
// of 1e-12. Requires prob in (0, 1) and a, b > 0.
double BetaQuantile(double prob, double a, double b);

}  // namespace dpcert

#endif  // DPCERT_SPECIAL_FUNCTIONS_H_
