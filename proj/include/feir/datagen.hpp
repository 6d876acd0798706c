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

#include "feir/types.hpp"

namespace feir {

enum class Family { kRandom, kSuPair, kItemGroups, kUserGroups };

Family ParseFamily(const std::string& name);
std::string ToString(Family family);

// Parameters of a synthetic dataset. Scores are drawn from Normal(mean,
// stddev^2) truncated to (0, 1); boosted rows or columns use mean +
// group_boost. The first round(group_fraction * count) rows (user groups) or
// columns (item groups) are the boosted ones.
struct GenSpec {
  Family family = Family::kRandom;
  int m = 100;
  int n = 20;
  std::uint64_t seed = 0;
  double group_fraction = 0.5;
  double group_boost = 0.3;
  double mean = 0.5;
  double stddev = 0.25;

  // Sensible dimensions per family: random 100x20, su_pair 50x50, groups
  // 20x100.
  static GenSpec Defaults(Family family, std::uint64_t seed = 0);
  void Validate() const;
  int BoostedCount() const;
};

ScorePair GenRandom(const GenSpec& spec);
ScorePair GenSuPair(const GenSpec& spec);
ScorePair GenItemGroups(const GenSpec& spec);
ScorePair GenUserGroups(const GenSpec& spec);
ScorePair Generate(const GenSpec& spec);

// Draw for entry (i, j) of matrix `stream`, a pure function of its arguments.
double TruncatedNormalAt(std::uint64_t seed, int stream, int i, int j,
                         double mean, double stddev);

}  // namespace feir
