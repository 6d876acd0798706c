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
#include "feir/pareto.hpp"

#include <random>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "feir/core.hpp"
#include "feir/errors.hpp"
#include "oracle.hpp"

namespace feir {
namespace {

using XY = std::vector<std::pair<double, double>>;

XY Coordinates(const Front2D& f) {
  XY out;
  for (const auto& p : f.points) out.push_back({p.x, p.y});
  return out;
}

XY RandomCloud(std::mt19937_64& rng, int size) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  XY out(size);
  for (auto& p : out) p = {d(rng), d(rng)};
  return out;
}

SolutionPoint Point(double g, double u) {
  SolutionPoint p;
  p.method = "feir";
  p.overall_norm = g;
  p.utility_norm = u;
  return p;
}

TEST(ParetoFrontTest, Example) {
  const XY front =
      Coordinates(ParetoFront(XY{{0.2, 0.9}, {0.5, 0.95}, {0.6, 0.9}}));
  EXPECT_EQ(front, (XY{{0.2, 0.9}, {0.5, 0.95}}));
}

TEST(ParetoFrontTest, SingleAndDuplicates) {
  EXPECT_EQ(Coordinates(ParetoFront(XY{{0.3, 0.7}})), (XY{{0.3, 0.7}}));
  EXPECT_EQ(Coordinates(ParetoFront(XY{{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}})),
            (XY{{0.3, 0.7}}));
}

TEST(ParetoFrontTest, EmptyIsArgumentError) {
  EXPECT_THROW(ParetoFront(XY{}), ArgumentError);
  EXPECT_THROW(ParetoFront(std::vector<SolutionPoint>{}, "overall_norm"),
               ArgumentError);
  // Defined on neither axis.
  SolutionPoint p;
  EXPECT_THROW(ParetoFront({p}, "overall_norm"), ArgumentError);
}

TEST(ParetoFrontTest, SolutionPointsKeepSourceIndex) {
  std::vector<SolutionPoint> pts{Point(0.6, 0.9), Point(0.2, 0.9),
                                 Point(0.5, 0.95)};
  pts.push_back(Point(0.1, 0.99));
  pts.back().status = "error: diverged";
  const Front2D f = ParetoFront(pts, "overall_norm");
  ASSERT_EQ(f.points.size(), 2u);
  EXPECT_EQ(f.points[0].source, 1);
  EXPECT_EQ(f.points[1].source, 2);
  EXPECT_EQ(f.x_metric, "overall_norm");
  EXPECT_EQ(f.y_metric, "utility_norm");
}

TEST(ParetoFrontTest, MatchesOracleAndIsIdempotent) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    XY cloud = RandomCloud(rng, 1 + t % 15);
    // Repeat some coordinates to exercise ties.
    if (t % 3 == 0) cloud.push_back({cloud[0].first, cloud.back().second});
    const XY front = Coordinates(ParetoFront(cloud));
    EXPECT_EQ(front, oracle::Front(cloud));
    EXPECT_EQ(Coordinates(ParetoFront(front)), front);
    for (std::size_t i = 1; i < front.size(); ++i) {
      EXPECT_LT(front[i - 1].first, front[i].first);
      EXPECT_LT(front[i - 1].second, front[i].second);
    }
  }
}

TEST(HypervolumeTest, Examples) {
  const std::pair<double, double> ref{1.0, 0.95};
  EXPECT_NEAR(Hypervolume2D(ParetoFront(XY{{0.5, 0.97}}), ref), 0.01, 1e-15);
  EXPECT_EQ(Hypervolume2D(ParetoFront(XY{{1.2, 0.99}, {0.5, 0.9}}), ref), 0.0);
  EXPECT_NEAR(Hypervolume2D(ParetoFront(XY{{0.2, 0.97}, {0.5, 0.99}}), ref),
              0.026, 1e-15);
}

TEST(HypervolumeTest, BoundaryPointsContributeZeroArea) {
  EXPECT_EQ(Hypervolume2D(ParetoFront(XY{{1.0, 0.99}}), {1.0, 0.95}), 0.0);
  EXPECT_EQ(Hypervolume2D(ParetoFront(XY{{0.3, 0.95}}), {1.0, 0.95}), 0.0);
}

TEST(HypervolumeTest, RankReference) {
  // Raw mean rank against the rank reference point.
  EXPECT_NEAR(Hypervolume2D(ParetoFront(XY{{10.0, 0.95}}), {50.0, 0.9}), 2.0,
              1e-12);
}

TEST(HypervolumeTest, MatchesOracle) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const XY cloud = RandomCloud(rng, 1 + t % 12);
    const std::pair<double, double> ref{0.9, 0.1};
    EXPECT_NEAR(Hypervolume2D(ParetoFront(cloud), ref),
                oracle::Hypervolume(cloud, ref), 1e-12);
  }
}

TEST(HypervolumeTest, Monotone) {
  std::mt19937_64 rng(3);
  const std::pair<double, double> ref{1.0, 0.0};
  for (int t = 0; t < 50; ++t) {
    XY cloud = RandomCloud(rng, 5);
    const double before = Hypervolume2D(ParetoFront(cloud), ref);
    cloud.push_back(RandomCloud(rng, 1)[0]);
    EXPECT_GE(Hypervolume2D(ParetoFront(cloud), ref), before);
    // A point dominated by an existing one changes nothing.
    const double after = Hypervolume2D(ParetoFront(cloud), ref);
    cloud.push_back({cloud[0].first + 0.01, cloud[0].second - 0.01});
    EXPECT_EQ(Hypervolume2D(ParetoFront(cloud), ref), after);
  }
}

TEST(MinFairnessTest, Examples) {
  const std::vector<SolutionPoint> pts{Point(0.14, 0.96), Point(0.10, 0.90)};
  EXPECT_DOUBLE_EQ(*MinFairnessAboveThreshold(pts, "overall_norm", 0.95), 0.14);
  EXPECT_FALSE(
      MinFairnessAboveThreshold(pts, "overall_norm", 0.97).has_value());
  EXPECT_DOUBLE_EQ(*MinFairnessAboveThreshold(pts, "overall_norm", 0.0), 0.10);
  EXPECT_THROW(MinFairnessAboveThreshold(pts, "ndcg", 0.5), ArgumentError);
}

TEST(MinFairnessTest, StrictThreshold) {
  const std::vector<SolutionPoint> pts{Point(0.2, 0.95)};
  EXPECT_FALSE(
      MinFairnessAboveThreshold(pts, "overall_norm", 0.95).has_value());
}

TEST(MinFairnessTest, NonIncreasingAsThresholdDrops) {
  std::mt19937_64 rng(4);
  std::vector<SolutionPoint> pts;
  for (const auto& [g, u] : RandomCloud(rng, 30)) pts.push_back(Point(g, u));
  std::optional<double> prev;
  for (double t = 1.0; t >= 0.0; t -= 0.05) {
    const auto cur = MinFairnessAboveThreshold(pts, "overall_norm", t);
    if (prev) {
      ASSERT_TRUE(cur.has_value());
      EXPECT_LE(*cur, *prev);
    }
    prev = cur;
  }
}

TEST(SolutionPointTest, MetricLookup) {
  MetricsRecord rec;
  rec.system = {0.8, 0.05, 0.1, 0.15, 3};
  rec.mean_rank = 1.5;
  rec.mean_gap = 0.02;
  rec.gini = 0.4;
  MetricsRecord naive;
  naive.system = {1.0, 0.0, 0.2, 0.2, 3};
  const SolutionPoint p = MakeSolutionPoint("ca", rec, naive);
  EXPECT_EQ(p.k, 3);
  EXPECT_DOUBLE_EQ(*p.Metric("utility_norm"), 0.8);
  EXPECT_DOUBLE_EQ(*p.Metric("inferiority_norm"), 0.5);
  EXPECT_DOUBLE_EQ(*p.Metric("overall_norm"), 0.75);
  EXPECT_DOUBLE_EQ(*p.Metric("mean_rank"), 1.5);
  EXPECT_DOUBLE_EQ(*p.Metric("gini"), 0.4);
  EXPECT_THROW(p.Metric("hv"), ArgumentError);

  naive.system.inferiority = naive.system.overall_fairness = 0.0;
  EXPECT_FALSE(MakeSolutionPoint("ca", rec, naive).Metric("overall_norm"));
}

}  // namespace
}  // namespace feir
