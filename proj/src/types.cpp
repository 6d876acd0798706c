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
#include "feir/types.hpp"

#include <cmath>

#include <fmt/core.h>

namespace feir {

namespace {

void CheckOpenUnit(const Matrix& m, const char* name) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!(v > 0.0 && v < 1.0)) {
        throw ArgumentError(fmt::format(
            "{} entry ({}, {}) = {} is outside (0, 1)", name, i, j, v));
      }
    }
  }
}

}  // namespace

ScorePair ScorePair::Shared(Matrix scores) {
  ScorePair pair;
  pair.suitability = scores;
  pair.utility = std::move(scores);
  pair.shared = true;
  return pair;
}

ScorePair ScorePair::Distinct(Matrix utility, Matrix suitability) {
  ScorePair pair;
  pair.utility = std::move(utility);
  pair.suitability = std::move(suitability);
  pair.shared = false;
  return pair;
}

void ScorePair::Validate() const {
  if (utility.size() == 0) throw DimensionError("empty score matrix");
  if (utility.rows() != suitability.rows() ||
      utility.cols() != suitability.cols()) {
    throw DimensionError(
        fmt::format("utility is {}x{} but suitability is {}x{}", utility.rows(),
                    utility.cols(), suitability.rows(), suitability.cols()));
  }
  CheckOpenUnit(utility, "utility");
  CheckOpenUnit(suitability, "suitability");
  if (shared && utility != suitability) {
    throw ArgumentError("shared score pair with differing U and S");
  }
}

void Policy::Validate(double row_tol) const {
  if (probs.size() == 0) throw DimensionError("empty policy");
  if (k < 1 || k > probs.cols()) {
    throw ArgumentError(fmt::format("k = {} outside [1, {}]", k, probs.cols()));
  }
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < probs.cols(); ++j) {
      const double p = probs(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError(
            fmt::format("policy entry ({}, {}) = {} not in [0, 1]", i, j, p));
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > row_tol) {
      throw ArgumentError(
          fmt::format("policy row {} sums to {}, expected 1", i, sum));
    }
  }
}

bool CountMatrix::IsBinary() const {
  return (counts.array() >= 0).all() && (counts.array() <= 1).all();
}

void CountMatrix::Validate() const {
  if ((counts.array() < 0).any()) {
    throw ArgumentError("count matrix has negative entries");
  }
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    if (counts.row(i).sum() != k) {
      throw ArgumentError(fmt::format("count row {} sums to {}, expected {}", i,
                                      counts.row(i).sum(), k));
    }
  }
}

}  // namespace feir
