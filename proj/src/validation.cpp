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
#include "feir/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include <fmt/core.h>

#include "feir/baselines.hpp"
#include "feir/core.hpp"
#include "feir/losses.hpp"
#include "feir/metrics.hpp"
#include "feir/pareto.hpp"

namespace feir {

namespace {

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

ScorePair RandomScores(int m, int n, std::uint64_t seed, bool shared) {
  std::mt19937_64 rng(seed);
  Matrix u(m, n), s(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) u(i, j) = Uniform(rng, 0.01, 0.99);
  }
  if (shared) return ScorePair::Shared(u);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) s(i, j) = Uniform(rng, 0.01, 0.99);
  }
  return ScorePair::Distinct(u, s);
}

Matrix RandomPolicy(int m, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix z(m, n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) z(i, j) = normal(rng);
  }
  return RowSoftmax(z);
}

CheckResult CheckClosedForms(int instances, int samples, double z,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const int m = UniformInt(rng, 2, 4), n = UniformInt(rng, 2, 6);
    const int k = UniformInt(rng, 1, std::min(3, n));
    const ScorePair sc = RandomScores(m, n, rng());
    const Matrix p = RandomPolicy(m, n, rng());
    const MonteCarloEstimate mc =
        EstimateByMonteCarlo(sc, p, k, samples, rng());
    const auto score = [&](double exact, double est, double se) {
      const double dev = std::abs(exact - est);
      worst = std::max(worst, se > 0.0 ? dev / se : (dev > 1e-12 ? 1e9 : 0.0));
    };
    for (int i = 0; i < m; ++i) {
      score(ExpectedUserUtility(i, sc.utility, p, k), mc.utility(i),
            mc.utility_se(i));
      for (int r = 0; r < m; ++r) {
        if (r == i) continue;
        score(ExpectedPairEnvy(i, r, sc.utility, p, k), mc.envy(i, r),
              mc.envy_se(i, r));
        score(ExpectedPairInferiority(i, r, sc.suitability, p, k),
              mc.inferiority(i, r), mc.inferiority_se(i, r));
      }
    }
  }
  return {
      "closed_forms", worst < z,
      fmt::format("max deviation {:.2f} standard errors (limit {})", worst, z)};
}

CheckResult CheckGradients(int instances, double h, double tol,
                           double envy_margin, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  long checked = 0;
  for (int t = 0; t < instances; ++t) {
    const int m = 4, n = 6, k = UniformInt(rng, 1, 3);
    const ScorePair sc = RandomScores(m, n, rng());
    const LossWeights w{Uniform(rng, 0.1, 2.0), Uniform(rng, 0.1, 2.0),
                        Uniform(rng, 0.1, 2.0), Uniform(rng, 0.1, 2.0)};
    for (Parametrization par :
         {Parametrization::kLogits, Parametrization::kDirect}) {
      Matrix params = RandomPolicy(m, n, rng());
      if (par == Parametrization::kLogits) params = params.array().log();
      const Matrix probs =
          par == Parametrization::kLogits ? RowSoftmax(params) : params;

      std::vector<bool> near_kink(m, false);
      for (int i = 0; i < m; ++i) {
        for (int r = 0; r < m; ++r) {
          if (r != i && std::abs(ExpectedPairEnvy(i, r, sc.utility, probs,
                                                  k)) <= envy_margin) {
            near_kink[i] = near_kink[r] = true;
          }
        }
      }
      const Matrix analytic = GradTotalLoss(sc, params, k, w, par);
      const Matrix numeric = FiniteDiffGrad(
          [&](const Matrix& x) { return LossAtParams(sc, x, k, w, par).total; },
          params, h);
      for (int i = 0; i < m; ++i) {
        if (near_kink[i]) continue;
        for (int j = 0; j < n; ++j) {
          const double a = analytic(i, j), f = numeric(i, j);
          const double scale = std::max({std::abs(a), std::abs(f), 1e-6});
          worst = std::max(worst, std::abs(a - f) / scale);
          ++checked;
        }
      }
    }
  }
  return {"gradients", worst < tol && checked > 0,
          fmt::format("max relative error {:.3g} over {} coordinates "
                      "(limit {})",
                      worst, checked, tol)};
}

CheckResult CheckToyExamples() {
  const Matrix u = (Matrix(2, 3) << 0.2, 0.6, 0.9, 0.1, 0.8, 0.7).finished();
  const Matrix s = (Matrix(2, 3) << 0.3, 0.9, 0.4, 0.3, 0.8, 0.8).finished();
  const auto counts = [](std::vector<int> a, std::vector<int> b) {
    IntMatrix c = IntMatrix::Zero(2, 3);
    for (int j : a) c(0, j) = 1;
    for (int j : b) c(1, j) = 1;
    return CountMatrix{c, 1};
  };
  const CountMatrix both_triangle = counts({2}, {2});
  const CountMatrix split = counts({0}, {1});
  const CountMatrix both_circle = counts({0}, {0});

  const Matrix t = (Matrix(2, 3) << 0.1, 0.9, 0.8, 0.4, 0.6, 0.5).finished();
  const CountMatrix both_square = counts({1}, {1});

  struct Case {
    double got;
    double want;
  };
  const Case cases[] = {
      {UserEnvy(0, 1, u, both_triangle), 0.0},
      {UserEnvy(1, 0, u, both_triangle), 0.0},
      {UserInferiority(0, 1, s, both_triangle), 0.4},
      {UserInferiority(1, 0, s, both_triangle), 0.0},
      {UserEnvy(0, 1, u, split), 0.4},
      {UserInferiority(0, 1, s, split), 0.0},
      {UserInferiority(1, 0, s, split), 0.0},
      {UserEnvy(0, 1, u, both_circle), 0.0},
      {UserEnvy(1, 0, u, both_circle), 0.0},
      {UserInferiority(0, 1, s, both_circle), 0.0},
      {UserInferiority(1, 0, s, both_circle), 0.0},
      {UserInferiority(1, 0, t, both_square), 0.3},
  };
  double worst = 0.0;
  for (const Case& c : cases) worst = std::max(worst, std::abs(c.got - c.want));
  return {"toy_examples", worst <= 1e-12,
          fmt::format("max abs error {:.3g}", worst)};
}

CheckResult CheckNaiveEnvy(int instances, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int t = 0; t < instances; ++t) {
    const int m = UniformInt(rng, 2, 50), n = UniformInt(rng, 1, 100);
    const int k = UniformInt(rng, 1, std::min(n, 20));
    const ScorePair sc = RandomScores(m, n, rng(), true);
    const SystemMetrics sm =
        ComputeSystemMetrics(sc.utility, sc.suitability, Naive(sc, k));
    worst = std::max(worst, std::abs(sm.envy));
  }
  return {"naive_envy", worst == 0.0,
          fmt::format("max system envy {:.3g}", worst)};
}

CheckResult CheckSinkhorn(int instances, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst_marginal = 0.0, worst_drop = 0.0;
  for (int t = 0; t < instances; ++t) {
    const int m = UniformInt(rng, 2, 12), n = UniformInt(rng, 2, 12);
    const ScorePair sc = RandomScores(m, n, rng(), true);
    CAConfig cfg;
    cfg.epsilon = Uniform(rng, 0.01, 0.5);
    const CAResult res = CongestionAlleviation(sc, 1, cfg);
    const Matrix& q = res.policy.probs;
    worst_marginal = std::max(
        {worst_marginal, (q.rowwise().sum().array() - 1.0).abs().maxCoeff(),
         (q.colwise().sum().array() - double(m) / n).abs().maxCoeff()});
    for (std::size_t s = 1; s < res.dual_objective.size(); ++s) {
      const double prev = res.dual_objective[s - 1];
      const double drop =
          (prev - res.dual_objective[s]) / std::max(1.0, std::abs(prev));
      worst_drop = std::max(worst_drop, drop);
    }
  }
  return {
      "sinkhorn", worst_marginal <= tol && worst_drop <= 1e-12,
      fmt::format("max marginal error {:.3g}, max relative dual drop {:.3g}",
                  worst_marginal, worst_drop)};
}

CheckResult CheckHypervolume(int fronts, int samples, double tol,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int side = std::max(1, static_cast<int>(std::sqrt(double(samples))));
  double worst = 0.0;
  for (int t = 0; t < fronts; ++t) {
    std::vector<std::pair<double, double>> xy(UniformInt(rng, 1, 10));
    for (auto& p : xy) p = {UniformUnit(rng), UniformUnit(rng)};
    const std::pair<double, double> ref{1.0, 0.0};
    const double exact = Hypervolume2D(ParetoFront(xy), ref);

    // Jittered grid over the unit box: one uniform sample per cell.
    long inside = 0;
    for (int a = 0; a < side; ++a) {
      for (int b = 0; b < side; ++b) {
        const double x = (a + UniformUnit(rng)) / side;
        const double y = (b + UniformUnit(rng)) / side;
        for (const auto& p : xy) {
          if (p.first <= x && p.second >= y) {
            ++inside;
            break;
          }
        }
      }
    }
    const double estimate = double(inside) / (double(side) * side);
    worst = std::max(worst, std::abs(exact - estimate));
  }
  return {"hypervolume", worst < tol,
          fmt::format("max abs deviation {:.3g} (limit {})", worst, tol)};
}

std::vector<CheckResult> RunAllChecks(std::uint64_t seed) {
  std::vector<CheckResult> out;
  const auto guarded = [&](const char* name, auto&& fn) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, fmt::format("threw: {}", e.what())});
    }
  };
  guarded("closed_forms",
          [&] { return CheckClosedForms(5, 20000, 4.0, seed + 1); });
  guarded("gradients",
          [&] { return CheckGradients(5, 1e-5, 1e-5, 1e-3, seed + 2); });
  guarded("toy_examples", [] { return CheckToyExamples(); });
  guarded("naive_envy", [&] { return CheckNaiveEnvy(20, seed + 3); });
  guarded("sinkhorn", [&] { return CheckSinkhorn(5, 1e-6, seed + 4); });
  guarded("hypervolume",
          [&] { return CheckHypervolume(10, 250000, 1e-3, seed + 5); });
  return out;
}

}  // namespace feir
