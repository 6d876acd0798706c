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

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "feir/types.hpp"

namespace feir {

// System-level utility, envy and inferiority of a realized recommendation.
struct SystemMetrics {
  double utility = 0.0;
  double envy = 0.0;
  double inferiority = 0.0;
  double overall_fairness = 0.0;  // envy + inferiority
  int k = 0;
};

// Metrics divided by the naive top-k values at the same k. Envy is kept raw
// because naive recommendation is envy-free. A ratio whose denominator is
// zero is left empty.
struct NormalizedMetrics {
  std::optional<double> utility;
  std::optional<double> inferiority;
  std::optional<double> overall_fairness;
  double envy = 0.0;
};

struct CompetitionMetrics {
  Vector mean_rank_per_user;
  Vector mean_gap_per_user;
  double mean_rank = 0.0;
  double mean_gap = 0.0;
};

// Divisor applied to the pair sums of envy and inferiority. kUsers is the
// 1/m of the original definition; kPairs uses 1/(m(m-1)).
enum class PairNormalizer { kUsers, kPairs };

double UserUtility(int i, const Matrix& utility, const CountMatrix& c);

// Signed envy of user i towards user i_star.
double UserEnvy(int i, int i_star, const Matrix& utility, const CountMatrix& c);

// Suitability deficit of user i against i_star on shared items. Items that
// appear several times in a list are counted once.
double UserInferiority(int i, int i_star, const Matrix& suitability,
                       const CountMatrix& c);

SystemMetrics ComputeSystemMetrics(
    const Matrix& utility, const Matrix& suitability, const CountMatrix& c,
    PairNormalizer normalizer = PairNormalizer::kUsers);

// Total inferiority of each user against all rivals, sum over i* of f(i, i*).
Vector PerUserInferiority(const Matrix& suitability, const CountMatrix& c);

NormalizedMetrics Normalize(const SystemMetrics& metrics,
                            const SystemMetrics& naive);

// Mean rank counts strictly better-suited rivals per recommended item; mean
// gap averages their suitability advantage. Requires a binary C.
CompetitionMetrics ComputeCompetitionMetrics(const Matrix& suitability,
                                             const CountMatrix& c);

// Gini coefficient of item exposure x_j = sum_i C(i, j).
double GiniIndex(const CountMatrix& c);

// Flat record written to reports.
struct MetricsRecord {
  SystemMetrics system;
  double mean_rank = 0.0;
  double mean_gap = 0.0;
  double gini = 0.0;
};

MetricsRecord Evaluate(const ScorePair& scores, const CountMatrix& c);
nlohmann::json ToJson(const MetricsRecord& record);

}  // namespace feir
