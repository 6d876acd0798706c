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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "feir/losses.hpp"
#include "feir/metrics.hpp"

namespace feir {

// One evaluated strategy: method, hyperparameters, k and its deterministic
// top-k metrics. Normalized fields are empty when the naive denominator is 0.
struct SolutionPoint {
  std::string method;
  std::optional<LossWeights> weights;
  std::optional<int> d;
  std::optional<double> epsilon;
  std::optional<double> tau;
  int k = 0;
  std::uint64_t seed = 0;

  double utility = 0.0;
  double envy = 0.0;
  double inferiority = 0.0;
  std::optional<double> utility_norm;
  std::optional<double> inferiority_norm;
  std::optional<double> overall_norm;
  double mean_rank = 0.0;
  double mean_gap = 0.0;
  double gini = 0.0;
  std::string status = "ok";

  // Looks a metric up by its solutions.csv column name. Throws ArgumentError
  // for unknown names; returns empty when the value is undefined.
  std::optional<double> Metric(const std::string& name) const;
};

// Fills the metric fields from an evaluation and the naive reference at the
// same k.
SolutionPoint MakeSolutionPoint(std::string method, const MetricsRecord& rec,
                                const MetricsRecord& naive);

struct FrontPoint {
  double x = 0.0;
  double y = 0.0;
  int source = -1;  // index into the input points, -1 for raw input
};

// Non-dominated points under (minimize x, maximize y), ascending x.
struct Front2D {
  std::string x_metric;
  std::string y_metric;
  std::vector<FrontPoint> points;
};

Front2D ParetoFront(const std::vector<SolutionPoint>& points,
                    const std::string& x_metric,
                    const std::string& y_metric = "utility_norm");
Front2D ParetoFront(const std::vector<std::pair<double, double>>& xy);

// Area dominated by the front inside [x, x_ref] x [y_ref, y]. Points that do
// not dominate the reference contribute nothing.
double Hypervolume2D(const Front2D& front, std::pair<double, double> ref);

// Smallest `phi_metric` among points whose normalized utility exceeds t.
std::optional<double> MinFairnessAboveThreshold(
    const std::vector<SolutionPoint>& points, const std::string& phi_metric,
    double t);

}  // namespace feir
