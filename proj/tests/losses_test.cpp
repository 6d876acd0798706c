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
#include "feir/losses.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "feir/core.hpp"
#include "feir/errors.hpp"
#include "feir/metrics.hpp"
#include "oracle.hpp"

namespace feir {
namespace {

const Matrix kU = (Matrix(2, 3) << 0.2, 0.6, 0.9, 0.1, 0.8, 0.7).finished();
const Matrix kS = (Matrix(2, 3) << 0.3, 0.9, 0.4, 0.3, 0.8, 0.8).finished();
const Matrix kT = (Matrix(2, 3) << 0.1, 0.9, 0.8, 0.4, 0.6, 0.5).finished();

Matrix OneHot(const std::vector<int>& cols, int n) {
  Matrix p = Matrix::Zero(cols.size(), n);
  for (std::size_t i = 0; i < cols.size(); ++i) p(i, cols[i]) = 1.0;
  return p;
}

TEST(ExpectedUtilityTest, Examples) {
  EXPECT_DOUBLE_EQ(ExpectedUserUtility(0, kU, OneHot({1, 0}, 3), 3), 3 * 0.6);
  EXPECT_NEAR(ExpectedUserUtility(1, kU, Matrix::Constant(2, 3, 1.0 / 3), 1),
              kU.row(1).mean(), 1e-15);
  Matrix p(2, 3);
  p << 0.5, 0.5, 0.0, 1.0, 0.0, 0.0;
  EXPECT_NEAR(ExpectedUserUtility(0, kU, p, 2), 0.8, 1e-15);
}

TEST(ExpectedUtilityTest, IndexError) {
  EXPECT_THROW(ExpectedUserUtility(5, kU, OneHot({0, 0}, 3), 1), ArgumentError);
}

TEST(ExpectedEnvyTest, Examples) {
  EXPECT_DOUBLE_EQ(
      ExpectedPairEnvy(0, 1, kU, Matrix::Constant(2, 3, 1.0 / 3), 2), 0.0);
  EXPECT_NEAR(ExpectedPairEnvy(0, 1, kU, OneHot({0, 1}, 3), 1), 0.4, 1e-15);
  EXPECT_THROW(ExpectedPairEnvy(1, 1, kU, OneHot({0, 1}, 3), 1), ArgumentError);
}

TEST(ExpectedInferiorityTest, Examples) {
  for (int k : {1, 2, 5}) {
    EXPECT_NEAR(ExpectedPairInferiority(0, 1, kS, OneHot({2, 2}, 3), k), 0.4,
                1e-15);
  }
  EXPECT_DOUBLE_EQ(ExpectedPairInferiority(0, 1, kS, OneHot({0, 1}, 3), 3),
                   0.0);

  const Matrix s = (Matrix(2, 2) << 0.2, 0.5, 0.6, 0.5).finished();
  const Matrix p = Matrix::Constant(2, 2, 0.5);
  EXPECT_NEAR(ExpectedPairInferiority(0, 1, s, p, 2), 0.225, 1e-15);
  EXPECT_THROW(ExpectedPairInferiority(0, 0, s, p, 2), ArgumentError);
}

TEST(ExpectedInferiorityTest, PowOneMinusIsStable) {
  EXPECT_DOUBLE_EQ(PowOneMinus(0.0, 7), 1.0);
  EXPECT_DOUBLE_EQ(PowOneMinus(1.0, 3), 0.0);
  EXPECT_NEAR(PowOneMinus(0.3, 5), std::pow(0.7, 5), 1e-15);
  const double near_one = 1.0 - 1e-14;
  const double gap = 1.0 - near_one;  // exact by Sterbenz
  EXPECT_NEAR(PowOneMinus(near_one, 2), gap * gap, 1e-12 * gap * gap);
  EXPECT_NEAR(PowOneMinus(1e-3, 1000), std::exp(1000 * std::log1p(-1e-3)),
              1e-14);
}

// One-hot rows reproduce the deterministic values with count k on the item.
TEST(ExpectationsTest, DegenerateConsistency) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const int m = 2 + t % 3, n = 2 + t % 4, k = 1 + t % 3;
    const Matrix u = oracle::RandomUnit(m, n, rng),
                 s = oracle::RandomUnit(m, n, rng);
    std::vector<int> pick(m);
    for (int& j : pick) j = rng() % n;
    const Matrix p = OneHot(pick, n);
    IntMatrix c = IntMatrix::Zero(m, n);
    for (int i = 0; i < m; ++i) c(i, pick[i]) = k;
    const CountMatrix counts{c, k};
    for (int i = 0; i < m; ++i) {
      EXPECT_NEAR(ExpectedUserUtility(i, u, p, k), UserUtility(i, u, counts),
                  1e-12);
      for (int r = 0; r < m; ++r) {
        if (r == i) continue;
        EXPECT_NEAR(ExpectedPairEnvy(i, r, u, p, k), UserEnvy(i, r, u, counts),
                    1e-12);
        EXPECT_NEAR(ExpectedPairInferiority(i, r, s, p, k),
                    UserInferiority(i, r, s, counts), 1e-12);
      }
    }
  }
}

TEST(ExpectationsTest, MatchExactEnumeration) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 25; ++t) {
    const int m = 2 + t % 2, n = 2 + t % 3, k = 1 + t % 3;
    const Matrix u = oracle::RandomUnit(m, n, rng),
                 s = oracle::RandomUnit(m, n, rng);
    const Matrix p = oracle::RandomStochastic(m, n, rng);
    const auto want = oracle::Exact(oracle::ToGrid(u), oracle::ToGrid(s),
                                    oracle::ToGrid(p), k);
    for (int i = 0; i < m; ++i) {
      EXPECT_NEAR(ExpectedUserUtility(i, u, p, k), want.utility[i], 1e-12);
      for (int r = 0; r < m; ++r) {
        if (r == i) continue;
        EXPECT_NEAR(ExpectedPairEnvy(i, r, u, p, k), want.envy[i][r], 1e-12);
        EXPECT_NEAR(ExpectedPairInferiority(i, r, s, p, k),
                    want.inferiority[i][r], 1e-12);
      }
    }
  }
}

TEST(SystemLossesTest, Examples) {
  const Matrix u1 = kU.topRows(1);
  const SystemLosses single = ComputeSystemLosses(u1, u1, OneHot({1}, 3), 1);
  EXPECT_EQ(single.envy, 0.0);
  EXPECT_EQ(single.inferiority, 0.0);

  const SystemLosses equal =
      ComputeSystemLosses(kU, kS, Matrix::Constant(2, 3, 1.0 / 3), 2);
  EXPECT_DOUBLE_EQ(equal.envy, 0.0);

  const SystemLosses square = ComputeSystemLosses(kT, kT, OneHot({1, 1}, 3), 1);
  EXPECT_NEAR(square.inferiority, 0.15, 1e-15);
  EXPECT_NEAR(square.neg_utility, -0.75, 1e-15);
}

TEST(SystemLossesTest, SignsOnRandomInputs) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    const int m = 2 + t % 4, n = 3 + t % 4, k = 1 + t % 3;
    const Matrix u = oracle::RandomUnit(m, n, rng);
    const SystemLosses l =
        ComputeSystemLosses(u, oracle::RandomUnit(m, n, rng),
                            oracle::RandomStochastic(m, n, rng), k);
    EXPECT_GE(l.envy, 0.0);
    EXPECT_GE(l.inferiority, 0.0);
    EXPECT_LE(l.neg_utility, 0.0);
  }
}

TEST(SystemLossesTest, DimensionMismatch) {
  EXPECT_THROW(ComputeSystemLosses(kU, kS, Matrix::Constant(2, 4, 0.25), 1),
               DimensionError);
}

TEST(PenaltyTest, Examples) {
  EXPECT_DOUBLE_EQ(PenaltyLoss(Matrix::Constant(3, 4, 0.25)), 0.0);
  EXPECT_NEAR(PenaltyLoss((Matrix(1, 2) << 0.7, 0.8).finished()), 0.25, 1e-15);
  EXPECT_NEAR(PenaltyLoss((Matrix(2, 2) << 0.4, 0.5, 0.6, 0.6).finished()),
              0.05, 1e-15);
}

TEST(TotalLossTest, Examples) {
  const ScorePair sc = ScorePair::Shared(kT);
  const Matrix p = OneHot({1, 1}, 3);
  const LossBreakdown only_u = TotalLoss(sc, p, 1, {0, 0, 1, 0});
  EXPECT_NEAR(only_u.total, only_u.neg_utility, 1e-15);

  const LossBreakdown all = TotalLoss(sc, p, 1, {1, 1, 1, 0});
  EXPECT_NEAR(all.total, -0.6, 1e-15);
  EXPECT_NEAR(all.inferiority, 0.15, 1e-15);
  EXPECT_DOUBLE_EQ(all.envy, 0.0);

  std::mt19937_64 rng(6);
  const ScorePair r = ScorePair::Distinct(oracle::RandomUnit(3, 4, rng),
                                          oracle::RandomUnit(3, 4, rng));
  const Matrix q = oracle::RandomStochastic(3, 4, rng);
  const LossWeights w{0.3, 0.7, 1.1, 0.2};
  const LossBreakdown a = TotalLoss(r, q, 2, w);
  const LossBreakdown b = TotalLoss(r, q, 2, {0.6, 1.4, 2.2, 0.4});
  EXPECT_NEAR(b.total, 2.0 * a.total, 1e-12);
  EXPECT_NEAR(a.total,
              w.envy * a.envy + w.inferiority * a.inferiority +
                  w.utility * a.neg_utility + w.penalty * a.penalty,
              1e-10);
}

TEST(LossWeightsTest, Validation) {
  EXPECT_NO_THROW((LossWeights{0, 0, 1, 0}.Validate()));
  EXPECT_THROW((LossWeights{-0.1, 0, 1, 0}.Validate()), ArgumentError);
  EXPECT_THROW((LossWeights{0, 0, 0, 1}.Validate()), ArgumentError);
}

TEST(LossWeightsTest, JsonRoundTrip) {
  const LossWeights w{0.5, 0.25, 1.0, 0.125};
  EXPECT_EQ(WeightsFromJson(ToJson(w)), w);
}

TEST(GradientTest, UtilityOnlyDirect) {
  std::mt19937_64 rng(7);
  const Matrix u = oracle::RandomUnit(3, 5, rng);
  const ScorePair sc = ScorePair::Shared(u);
  const int k = 2;
  const Matrix g = GradTotalLoss(sc, oracle::RandomStochastic(3, 5, rng), k,
                                 {0, 0, 1, 0}, Parametrization::kDirect);
  EXPECT_LT((g + (double(k) / 3) * u).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(GradientTest, UniformPolicySymmetricScores) {
  // Every row of U equal: nobody envies anybody under a uniform policy.
  Matrix u(3, 4);
  for (int i = 0; i < 3; ++i) u.row(i) << 0.2, 0.4, 0.6, 0.8;
  const ScorePair sc = ScorePair::Shared(u);
  const Matrix z = Matrix::Zero(3, 4);
  const LossWeights w{0.0, 1.0, 1.0, 0.0};
  const Matrix g = GradTotalLoss(sc, z, 2, w, Parametrization::kLogits);
  const Matrix fd = FiniteDiffGrad(
      [&](const Matrix& x) {
        return LossAtParams(sc, x, 2, w, Parametrization::kLogits).total;
      },
      z, 1e-5);
  EXPECT_LT((g - fd).cwiseAbs().maxCoeff(), 1e-8);
  // Identical rows get identical gradients.
  EXPECT_LT((g.row(0) - g.row(1)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(g.sum(), 0.0, 1e-12);
}

TEST(GradientTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int t = 0; t < 8; ++t) {
    const ScorePair sc = ScorePair::Distinct(oracle::RandomUnit(4, 6, rng),
                                             oracle::RandomUnit(4, 6, rng));
    const int k = 1 + t % 3;
    const LossWeights w{0.8, 1.3, 1.0, 0.4};
    for (Parametrization par :
         {Parametrization::kLogits, Parametrization::kDirect}) {
      const Matrix probs = oracle::RandomStochastic(4, 6, rng);
      const Matrix params =
          par == Parametrization::kLogits ? Matrix(probs.array().log()) : probs;
      bool near_kink = false;
      for (int i = 0; i < 4; ++i) {
        for (int r = 0; r < 4; ++r) {
          if (r != i &&
              std::abs(ExpectedPairEnvy(i, r, sc.utility, probs, k)) <= 1e-3)
            near_kink = true;
        }
      }
      if (near_kink) continue;
      const Matrix g = GradTotalLoss(sc, params, k, w, par);
      const Matrix fd = FiniteDiffGrad(
          [&](const Matrix& x) { return LossAtParams(sc, x, k, w, par).total; },
          params, 1e-5);
      for (int i = 0; i < g.size(); ++i) {
        const double a = g(i), f = fd(i);
        EXPECT_LT(std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1e-6}),
                  1e-5);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 4);
}

TEST(GradientTest, UnknownParametrization) {
  EXPECT_THROW(ParseParametrization("adagrad"), ArgumentError);
  EXPECT_EQ(ParseParametrization("logits"), Parametrization::kLogits);
  EXPECT_EQ(ToString(Parametrization::kDirect), "direct");
}

TEST(SoftmaxBackwardTest, RowsSumToZero) {
  std::mt19937_64 rng(9);
  const Matrix p = oracle::RandomStochastic(3, 5, rng);
  const Matrix g = SoftmaxBackward(p, oracle::RandomUnit(3, 5, rng));
  EXPECT_LT(g.rowwise().sum().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FiniteDiffTest, Examples) {
  const Matrix x = Matrix::Constant(1, 1, 1.0);
  const Matrix g = FiniteDiffGrad(
      [](const Matrix& v) { return v(0, 0) * v(0, 0); }, x, 1e-5);
  EXPECT_NEAR(g(0, 0), 2.0, 1e-8);
  const Matrix zero = FiniteDiffGrad([](const Matrix&) { return 3.0; },
                                     Matrix::Ones(2, 3), 1e-5);
  EXPECT_EQ(zero.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(FiniteDiffGrad([](const Matrix&) { return 0.0; }, x, 0.0),
               ArgumentError);
}

TEST(MonteCarloTest, DeterministicPolicyHasZeroVariance) {
  const ScorePair sc = ScorePair::Distinct(kU, kS);
  const Matrix p = OneHot({2, 2}, 3);
  const MonteCarloEstimate mc = EstimateByMonteCarlo(sc, p, 2, 50, 1);
  EXPECT_NEAR(mc.utility(0), ExpectedUserUtility(0, kU, p, 2), 1e-12);
  EXPECT_EQ(mc.utility_se.maxCoeff(), 0.0);
  EXPECT_NEAR(mc.inferiority(0, 1), 0.4, 1e-12);
  EXPECT_EQ(mc.inferiority_se.maxCoeff(), 0.0);
}

TEST(MonteCarloTest, AgreesWithClosedForms) {
  std::mt19937_64 rng(10);
  const ScorePair sc = ScorePair::Distinct(oracle::RandomUnit(3, 4, rng),
                                           oracle::RandomUnit(3, 4, rng));
  const Matrix p = oracle::RandomStochastic(3, 4, rng);
  const int k = 2;
  const MonteCarloEstimate mc = EstimateByMonteCarlo(sc, p, k, 100000, 11);
  for (int i = 0; i < 3; ++i) {
    EXPECT_LT(
        std::abs(mc.utility(i) - ExpectedUserUtility(i, sc.utility, p, k)),
        3 * mc.utility_se(i));
    for (int r = 0; r < 3; ++r) {
      if (r == i) continue;
      EXPECT_LT(
          std::abs(mc.envy(i, r) - ExpectedPairEnvy(i, r, sc.utility, p, k)),
          3 * mc.envy_se(i, r));
      EXPECT_LT(std::abs(mc.inferiority(i, r) -
                         ExpectedPairInferiority(i, r, sc.suitability, p, k)),
                3 * mc.inferiority_se(i, r) + 1e-15);
      EXPECT_GE(mc.positive_envy(i, r), std::max(0.0, mc.envy(i, r)) - 1e-12);
    }
  }
}

TEST(MonteCarloTest, HalfHalfInferiority) {
  const Matrix s = (Matrix(2, 2) << 0.2, 0.5, 0.6, 0.5).finished();
  const Matrix p = Matrix::Constant(2, 2, 0.5);
  const MonteCarloEstimate mc =
      EstimateByMonteCarlo(ScorePair::Shared(s), p, 2, 100000, 12);
  EXPECT_NEAR(mc.inferiority(0, 1), 0.5625 * 0.4, 3 * mc.inferiority_se(0, 1));
  EXPECT_THROW(EstimateByMonteCarlo(ScorePair::Shared(s), p, 2, 0, 1),
               ArgumentError);
}

}  // namespace
}  // namespace feir
