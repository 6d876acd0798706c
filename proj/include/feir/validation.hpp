// Copyright 2026 The FEIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feir/types.hpp"

namespace feir {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Random scores strictly inside (0, 1).
ScorePair RandomScores(int m, int n, std::uint64_t seed, bool shared = false);
// Row-softmax of standard normal logits.
Matrix RandomPolicy(int m, int n, std::uint64_t seed);

// Closed-form expectations against sampling: every per-user utility and
// per-pair envy/inferiority lies within `z` standard errors.
CheckResult CheckClosedForms(int instances, int samples, double z,
                             std::uint64_t seed);

// Analytic vs central-difference gradients of the combined loss in both
// parametrizations. Coordinates of users touching a pair with
// |E[e]| <= envy_margin are skipped (the envy max() kink).
CheckResult CheckGradients(int instances, double h, double tol,
                           double envy_margin, std::uint64_t seed);

// The two-user, three-item illustrations.
CheckResult CheckToyExamples();

// Naive top-k never produces envy.
CheckResult CheckNaiveEnvy(int instances, std::uint64_t seed);

// Sinkhorn marginals and monotone dual objective.
CheckResult CheckSinkhorn(int instances, double tol, std::uint64_t seed);

// 2-D hypervolume against uniform sampling of the reference box.
CheckResult CheckHypervolume(int fronts, int samples, double tol,
                             std::uint64_t seed);

// Quick versions of all of the above.
std::vector<CheckResult> RunAllChecks(std::uint64_t seed);

}  // namespace feir
