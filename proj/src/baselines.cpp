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
#include "feir/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/core.h>

namespace feir {

namespace {

std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// log(sum_t exp(v[t])) without overflow.
template <typename Fn>
double LogSumExp(int count, Fn value) {
  double hi = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < count; ++t) hi = std::max(hi, value(t));
  double s = 0.0;
  for (int t = 0; t < count; ++t) s += std::exp(value(t) - hi);
  return hi + std::log(s);
}

}  // namespace

CountMatrix Naive(const ScorePair& scores, int k) {
  return TopK(scores.utility, k);
}

CountMatrix Shuffle(const ScorePair& scores, int k, int d, std::uint64_t seed) {
  const int n = scores.items();
  if (k < 1 || k > n)
    throw ArgumentError(fmt::format("k = {} out of range", k));
  if (d < k || d > n) {
    throw ArgumentError(
        fmt::format("shuffle depth d = {} must be in [{}, {}]", d, k, n));
  }
  const CountMatrix pool = TopK(scores.utility, d);
  CountMatrix out{IntMatrix::Zero(scores.users(), n), k};
  std::mt19937_64 rng(seed);
  std::vector<int> top;
  for (int i = 0; i < scores.users(); ++i) {
    top.clear();
    for (int j = 0; j < n; ++j) {
      if (pool.counts(i, j)) top.push_back(j);
    }
    for (int t = 0; t < k; ++t) {
      const int pick = t + static_cast<int>(UniformBelow(rng, d - t));
      std::swap(top[t], top[pick]);
      out.counts(i, top[t]) = 1;
    }
  }
  return out;
}

void CAConfig::Validate() const {
  if (!(epsilon > 0.0)) throw ArgumentError("CA epsilon must be > 0");
  if (!(marginal_tol > 0.0)) throw ArgumentError("CA marginal_tol must be > 0");
  if (max_iters < 1) throw ArgumentError("CA max_iters must be >= 1");
}

CAResult CongestionAlleviation(const ScorePair& scores, int k,
                               const CAConfig& config) {
  config.Validate();
  const int m = scores.users(), n = scores.items();
  if (k < 1 || k > n)
    throw ArgumentError(fmt::format("k = {} out of range", k));
  const Matrix base = RowSoftmax(scores.utility);
  const double eps = config.epsilon;
  const double row_mass = 1.0;
  const double col_mass = static_cast<double>(m) / n;
  const double log_row = std::log(row_mass);
  const double log_col = std::log(col_mass);

  // Q(i, j) = exp((P0(i, j) + f(i) + g(j)) / eps).
  Vector f = Vector::Zero(m), g = Vector::Zero(n);
  Matrix kernel = base / eps;
  auto log_q = [&](int i, int j) { return kernel(i, j) + (f(i) + g(j)) / eps; };

  CAResult result;
  double residual = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < config.max_iters; ++it) {
    for (int i = 0; i < m; ++i) {
      const double lse =
          LogSumExp(n, [&](int j) { return kernel(i, j) + g(j) / eps; });
      f(i) = eps * (log_row - lse);
    }
    for (int j = 0; j < n; ++j) {
      const double lse =
          LogSumExp(m, [&](int i) { return kernel(i, j) + f(i) / eps; });
      g(j) = eps * (log_col - lse);
    }

    double mass = 0.0;
    residual = 0.0;
    Vector col = Vector::Zero(n);
    for (int i = 0; i < m; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        const double q = std::exp(log_q(i, j));
        row += q;
        col(j) += q;
      }
      mass += row;
      residual += std::abs(row - row_mass);
    }
    for (int j = 0; j < n; ++j) residual += std::abs(col(j) - col_mass);
    result.dual_objective.push_back(row_mass * f.sum() + col_mass * g.sum() -
                                    eps * mass);
    if (residual < config.marginal_tol) {
      ++it;
      break;
    }
  }
  if (residual >= config.marginal_tol) {
    throw ConvergenceError(
        fmt::format("Sinkhorn did not converge in {} sweeps (eps = {}, L1 "
                    "marginal residual {})",
                    config.max_iters, eps, residual),
        residual);
  }

  Matrix q(m, n);
  double primal = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const double lq = log_q(i, j);
      q(i, j) = std::exp(lq);
      primal += q(i, j) * base(i, j) - eps * q(i, j) * (lq - 1.0);
    }
  }
  result.policy = {std::move(q), k};
  result.iterations = it;
  result.residual = residual;
  result.primal_objective = primal;
  return result;
}

void RRConfig::Validate() const {
  if (!(tau >= 0.0 && tau < 1.0)) throw ArgumentError("tau must be in [0, 1)");
}

CountMatrix RoundRobin(const ScorePair& scores, int k, const RRConfig& config) {
  const int m = scores.users();
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  for (int i = m - 1; i > 0; --i) {
    std::swap(order[i], order[UniformBelow(rng, i + 1)]);
  }
  return RoundRobin(scores, k, config, order);
}

CountMatrix RoundRobin(const ScorePair& scores, int k, const RRConfig& config,
                       const std::vector<int>& user_order) {
  config.Validate();
  const int m = scores.users(), n = scores.items();
  if (k < 1 || k > n)
    throw ArgumentError(fmt::format("k = {} out of range", k));
  std::vector<char> listed(m, 0);
  for (int u : user_order) {
    if (u < 0 || u >= m || listed[u]) {
      throw ArgumentError("user order must list every user once");
    }
    listed[u] = 1;
  }
  if (static_cast<int>(user_order.size()) != m) {
    throw ArgumentError("user order must list every user once");
  }
  if (config.exclusive && static_cast<long>(m) * k > n) {
    throw ArgumentError(fmt::format(
        "exclusive round-robin needs m*k <= n (m = {}, k = {}, n = {}); lower "
        "k or disable exclusivity",
        m, k, n));
  }
  CountMatrix out{IntMatrix::Zero(m, n), k};
  std::vector<char> taken(n, 0);
  for (int round = 0; round < k; ++round) {
    for (int i : user_order) {
      int best = -1, fallback = -1;
      for (int j = 0; j < n; ++j) {
        if (out.counts(i, j) || (config.exclusive && taken[j])) continue;
        const double u = scores.utility(i, j);
        if (fallback < 0 || u > scores.utility(i, fallback)) fallback = j;
        if (scores.suitability(i, j) > config.tau &&
            (best < 0 || u > scores.utility(i, best))) {
          best = j;
        }
      }
      const int pick = best >= 0 ? best : fallback;
      out.counts(i, pick) = 1;
      taken[pick] = 1;
    }
  }
  return out;
}

}  // namespace feir
