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
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "feir/types.hpp"

namespace feir {

// Weights of the envy, inferiority, negative utility and row-sum penalty
// terms of the combined objective.
struct LossWeights {
  double envy = 0.0;
  double inferiority = 0.0;
  double utility = 1.0;
  double penalty = 0.0;

  void Validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct LossBreakdown {
  double envy = 0.0;
  double inferiority = 0.0;
  double neg_utility = 0.0;
  double penalty = 0.0;
  double total = 0.0;
};

nlohmann::json ToJson(const LossBreakdown& loss);
nlohmann::json ToJson(const LossWeights& weights);
LossWeights WeightsFromJson(const nlohmann::json& j);

// How the optimized parameters map to a policy. kLogits: P = RowSoftmax(Z)
// and the penalty term is dropped. kDirect: the parameters are P itself and
// the penalty keeps rows near the simplex.
enum class Parametrization { kLogits, kDirect };

Parametrization ParseParametrization(const std::string& name);
std::string ToString(Parametrization p);

// (1 - p)^k for integer k >= 0.
double PowOneMinus(double p, int k);

// Expectations under k independent draws per user from the rows of P.
double ExpectedUserUtility(int i, const Matrix& utility, const Matrix& probs,
                           int k);
// Signed; the max(0, .) is only applied at system level.
double ExpectedPairEnvy(int i, int i_star, const Matrix& utility,
                        const Matrix& probs, int k);
double ExpectedPairInferiority(int i, int i_star, const Matrix& suitability,
                               const Matrix& probs, int k);

struct SystemLosses {
  double neg_utility = 0.0;  // -(1/m) sum_i E[u_i], always <= 0
  double envy = 0.0;         // (1/m) sum_{i != i*} max(0, E[e(i, i*)])
  double inferiority = 0.0;  // (1/m) sum_{i != i*} E[f(i, i*)]
};

SystemLosses ComputeSystemLosses(const Matrix& utility,
                                 const Matrix& suitability, const Matrix& probs,
                                 int k);

// sum_i (sum_j P(i, j) - 1)^2
double PenaltyLoss(const Matrix& p_raw);

// Subset of the problem a loss evaluation looks at. Empty index lists mean
// "everything". Users in `inferiority_sources` are the i of the pairs
// f(i, i*); `user_normalizer` replaces m in the 1/m factors and
// `item_scale` multiplies every item sum.
struct LossScope {
  std::vector<int> users;
  std::vector<int> items;
  std::vector<int> inferiority_sources;
  double user_normalizer = 0.0;
  double item_scale = 1.0;
};

// Combined loss at policy `probs`. When `grad_probs` is non-null it receives
// the gradient w.r.t. every entry of `probs` (zero outside the scope). The
// penalty term is included only when `with_penalty` is set.
LossBreakdown EvaluateLoss(const ScorePair& scores, const Matrix& probs, int k,
                           const LossWeights& weights, const LossScope& scope,
                           bool with_penalty, Matrix* grad_probs);

// Full-scope loss at a policy, penalty included.
LossBreakdown TotalLoss(const ScorePair& scores, const Matrix& probs, int k,
                        const LossWeights& weights);

// Loss as a function of the raw parameters (logits or direct P).
LossBreakdown LossAtParams(const ScorePair& scores, const Matrix& params, int k,
                           const LossWeights& weights,
                           Parametrization parametrization,
                           const LossScope& scope = {});

// Analytic gradient of LossAtParams w.r.t. the parameters. The envy kink uses
// subgradient 0.
Matrix GradTotalLoss(const ScorePair& scores, const Matrix& params, int k,
                     const LossWeights& weights,
                     Parametrization parametrization,
                     const LossScope& scope = {});

// Pulls a gradient w.r.t. P back through the row softmax.
Matrix SoftmaxBackward(const Matrix& probs, const Matrix& grad_probs);

// Central differences (f(x + h) - f(x - h)) / 2h per coordinate.
Matrix FiniteDiffGrad(const std::function<double(const Matrix&)>& loss,
                      const Matrix& params, double h);

// Sample means (and standard errors) of the deterministic per-user and
// per-pair quantities over repeated multinomial draws.
struct MonteCarloEstimate {
  Vector utility;  // per user
  Vector utility_se;
  Matrix envy;  // (i, i*) signed, before any max(0, .)
  Matrix envy_se;
  Matrix positive_envy;  // E[max(0, e(i, i*))], for inspection only
  Matrix inferiority;    // (i, i*)
  Matrix inferiority_se;
  int samples = 0;
};

MonteCarloEstimate EstimateByMonteCarlo(const ScorePair& scores,
                                        const Matrix& probs, int k, int samples,
                                        std::uint64_t seed);

}  // namespace feir
