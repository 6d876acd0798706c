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
#include "feir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <fmt/core.h>

namespace feir {

namespace {

// Non-zero entries of each row as (item, count), in ascending item order.
using SparseRows = std::vector<std::vector<std::pair<int, int>>>;

SparseRows ToLists(const CountMatrix& c) {
  SparseRows lists(c.users());
  for (int i = 0; i < c.users(); ++i) {
    for (int j = 0; j < c.items(); ++j) {
      if (c.counts(i, j) != 0) lists[i].emplace_back(j, c.counts(i, j));
    }
  }
  return lists;
}

// Users holding item j, for every j.
std::vector<std::vector<int>> Holders(const CountMatrix& c) {
  std::vector<std::vector<int>> holders(c.items());
  for (int i = 0; i < c.users(); ++i) {
    for (int j = 0; j < c.items(); ++j) {
      if (c.counts(i, j) > 0) holders[j].push_back(i);
    }
  }
  return holders;
}

void CheckShapes(const Matrix& a, const CountMatrix& c, const char* name) {
  if (a.rows() != c.users() || a.cols() != c.items()) {
    throw DimensionError(fmt::format("{} is {}x{} but counts are {}x{}", name,
                                     a.rows(), a.cols(), c.users(), c.items()));
  }
}

void CheckUser(int i, int m) {
  if (i < 0 || i >= m) {
    throw ArgumentError(
        fmt::format("user index {} out of range [0, {})", i, m));
  }
}

void CheckPair(int i, int i_star, int m) {
  CheckUser(i, m);
  CheckUser(i_star, m);
  if (i == i_star) throw ArgumentError("pairwise measure needs i != i_star");
}

double WeightedListSum(const Matrix& values, int row,
                       const std::vector<std::pair<int, int>>& list) {
  double s = 0.0;
  for (const auto& [j, count] : list) s += values(row, j) * count;
  return s;
}

}  // namespace

double UserUtility(int i, const Matrix& utility, const CountMatrix& c) {
  CheckShapes(utility, c, "utility");
  CheckUser(i, c.users());
  double s = 0.0;
  for (int j = 0; j < c.items(); ++j) s += utility(i, j) * c.counts(i, j);
  return s;
}

double UserEnvy(int i, int i_star, const Matrix& utility,
                const CountMatrix& c) {
  CheckShapes(utility, c, "utility");
  CheckPair(i, i_star, c.users());
  double s = 0.0;
  for (int j = 0; j < c.items(); ++j) {
    s += utility(i, j) * (c.counts(i_star, j) - c.counts(i, j));
  }
  return s;
}

double UserInferiority(int i, int i_star, const Matrix& suitability,
                       const CountMatrix& c) {
  CheckShapes(suitability, c, "suitability");
  CheckPair(i, i_star, c.users());
  double s = 0.0;
  for (int j = 0; j < c.items(); ++j) {
    if (c.counts(i, j) > 0 && c.counts(i_star, j) > 0) {
      s += std::max(0.0, suitability(i_star, j) - suitability(i, j));
    }
  }
  return s;
}

Vector PerUserInferiority(const Matrix& suitability, const CountMatrix& c) {
  CheckShapes(suitability, c, "suitability");
  Vector per_user = Vector::Zero(c.users());
  const auto holders = Holders(c);
  for (int j = 0; j < c.items(); ++j) {
    for (int i : holders[j]) {
      for (int r : holders[j]) {
        if (r == i) continue;
        per_user(i) += std::max(0.0, suitability(r, j) - suitability(i, j));
      }
    }
  }
  return per_user;
}

SystemMetrics ComputeSystemMetrics(const Matrix& utility,
                                   const Matrix& suitability,
                                   const CountMatrix& c,
                                   PairNormalizer normalizer) {
  CheckShapes(utility, c, "utility");
  CheckShapes(suitability, c, "suitability");
  const int m = c.users();
  const auto lists = ToLists(c);

  SystemMetrics out;
  out.k = c.k;
  double utility_sum = 0.0;
  double envy_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    const double own = WeightedListSum(utility, i, lists[i]);
    utility_sum += own;
    for (int r = 0; r < m; ++r) {
      if (r == i) continue;
      const double e = WeightedListSum(utility, i, lists[r]) - own;
      if (e > 0.0) envy_sum += e;
    }
  }
  const Vector inferiority = PerUserInferiority(suitability, c);
  double inferiority_sum = 0.0;
  for (int i = 0; i < m; ++i) inferiority_sum += inferiority(i);

  double pair_div = m;
  if (normalizer == PairNormalizer::kPairs) {
    pair_div = m > 1 ? static_cast<double>(m) * (m - 1) : 1.0;
  }
  out.utility = utility_sum / m;
  out.envy = envy_sum / pair_div;
  out.inferiority = inferiority_sum / pair_div;
  out.overall_fairness = out.envy + out.inferiority;
  return out;
}

NormalizedMetrics Normalize(const SystemMetrics& metrics,
                            const SystemMetrics& naive) {
  auto ratio = [](double num, double den) -> std::optional<double> {
    if (den == 0.0) return std::nullopt;
    return num / den;
  };
  NormalizedMetrics out;
  out.utility = ratio(metrics.utility, naive.utility);
  out.inferiority = ratio(metrics.inferiority, naive.inferiority);
  out.overall_fairness =
      ratio(metrics.overall_fairness, naive.overall_fairness);
  out.envy = metrics.envy;
  return out;
}

CompetitionMetrics ComputeCompetitionMetrics(const Matrix& suitability,
                                             const CountMatrix& c) {
  CheckShapes(suitability, c, "suitability");
  if (!c.IsBinary()) {
    throw ArgumentError("competition metrics need a binary count matrix");
  }
  const int m = c.users();
  CompetitionMetrics out;
  out.mean_rank_per_user = Vector::Zero(m);
  out.mean_gap_per_user = Vector::Zero(m);
  const auto holders = Holders(c);
  for (int j = 0; j < c.items(); ++j) {
    for (int i : holders[j]) {
      int better = 0;
      double advantage = 0.0;
      for (int r : holders[j]) {
        if (suitability(r, j) > suitability(i, j)) {
          ++better;
          advantage += suitability(r, j) - suitability(i, j);
        }
      }
      out.mean_rank_per_user(i) += better;
      out.mean_gap_per_user(i) += advantage / std::max(1, better);
    }
  }
  out.mean_rank_per_user /= c.k;
  out.mean_gap_per_user /= c.k;
  out.mean_rank = out.mean_rank_per_user.mean();
  out.mean_gap = out.mean_gap_per_user.mean();
  return out;
}

double GiniIndex(const CountMatrix& c) {
  const int n = c.items();
  std::vector<double> x(n);
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    x[j] = c.counts.col(j).sum();
    total += x[j];
  }
  if (total == 0.0) return 0.0;
  // Sum over ordered pairs of |x_a - x_b| equals 2 * sum_r (2r - n + 1) x_(r)
  // for ascending order statistics x_(r).
  std::sort(x.begin(), x.end());
  double pair_sum = 0.0;
  for (int r = 0; r < n; ++r) pair_sum += (2.0 * r - n + 1.0) * x[r];
  pair_sum *= 2.0;
  return pair_sum / (2.0 * n * total);
}

MetricsRecord Evaluate(const ScorePair& scores, const CountMatrix& c) {
  MetricsRecord rec;
  rec.system = ComputeSystemMetrics(scores.utility, scores.suitability, c);
  if (c.IsBinary()) {
    const auto comp = ComputeCompetitionMetrics(scores.suitability, c);
    rec.mean_rank = comp.mean_rank;
    rec.mean_gap = comp.mean_gap;
  }
  rec.gini = GiniIndex(c);
  return rec;
}

nlohmann::json ToJson(const MetricsRecord& record) {
  return {{"utility", record.system.utility},
          {"envy", record.system.envy},
          {"inferiority", record.system.inferiority},
          {"overall_fairness", record.system.overall_fairness},
          {"mean_rank", record.mean_rank},
          {"mean_gap", record.mean_gap},
          {"gini", record.gini},
          {"k", record.system.k}};
}

}  // namespace feir
