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

#include <Eigen/Dense>

#include "feir/errors.hpp"

namespace feir {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntMatrix = Eigen::MatrixXi;

// Utility and suitability scores of m users for n items. Entries lie in the
// open interval (0, 1). When `shared` is set, S is a copy of U.
struct ScorePair {
  Matrix utility;
  Matrix suitability;
  bool shared = true;

  int users() const { return static_cast<int>(utility.rows()); }
  int items() const { return static_cast<int>(utility.cols()); }

  // Builds a pair where one score matrix plays both roles.
  static ScorePair Shared(Matrix scores);
  static ScorePair Distinct(Matrix utility, Matrix suitability);

  // Throws DimensionError / ArgumentError when the invariants do not hold.
  void Validate() const;
};

// Row-stochastic recommendation probabilities and the list length k.
struct Policy {
  Matrix probs;
  int k = 1;

  int users() const { return static_cast<int>(probs.rows()); }
  int items() const { return static_cast<int>(probs.cols()); }

  void Validate(double row_tol = 1e-9) const;
};

// Integer counts C(i, j) of item j in the list of user i; rows sum to k.
struct CountMatrix {
  IntMatrix counts;
  int k = 1;

  int users() const { return static_cast<int>(counts.rows()); }
  int items() const { return static_cast<int>(counts.cols()); }

  bool IsBinary() const;
  void Validate() const;
};

}  // namespace feir
