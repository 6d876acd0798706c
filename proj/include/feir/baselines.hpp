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

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "feir/core.hpp"

namespace feir {

// Top-k by utility.
CountMatrix Naive(const ScorePair& scores, int k);

// Per user, a uniform k-subset of the user's top-d items by utility.
CountMatrix Shuffle(const ScorePair& scores, int k, int d, std::uint64_t seed);

// Default top-d pool for Shuffle.
inline int DefaultShuffleDepth(int k, int n) { return std::min(3 * k, n); }

struct CAConfig {
  double epsilon = 1e-3;       // entropic regularization
  int max_iters = 100000;      // Sinkhorn sweeps
  double marginal_tol = 1e-9;  // L1 residual of both marginals

  void Validate() const;
};

struct CAResult {
  Policy policy;
  int iterations = 0;
  double residual = 0.0;
  // Dual objective after every sweep. It is the dual of the equivalent
  // cost-minimization problem (cost -P0), so it never decreases and converges
  // to -(sum Q P0 + eps H(Q)).
  std::vector<double> dual_objective;
  // sum Q P0 + eps H(Q) at the final iterate, H(Q) = -sum Q (log Q - 1).
  double primal_objective = 0.0;
};

// Congestion alleviation: entropic transport of unit row mass onto columns
// carrying m/n each, rewarding overlap with P0 = RowSoftmax(U). Solved by
// log-domain Sinkhorn sweeps. Throws ConvergenceError carrying the residual.
CAResult CongestionAlleviation(const ScorePair& scores, int k,
                               const CAConfig& config);

struct RRConfig {
  double tau = 0.0;        // suitability threshold
  std::uint64_t seed = 0;  // user order
  bool exclusive = true;   // each item goes to at most one user

  void Validate() const;
};

// Round-robin allocation over k rounds in a seeded random user order. Each
// turn takes the highest-utility admissible item with suitability above tau,
// falling back to the best admissible item when none passes the threshold.
CountMatrix RoundRobin(const ScorePair& scores, int k, const RRConfig& config);

// Same, with an explicit user order.
CountMatrix RoundRobin(const ScorePair& scores, int k, const RRConfig& config,
                       const std::vector<int>& user_order);

}  // namespace feir
