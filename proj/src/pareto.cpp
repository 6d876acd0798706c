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

#include <algorithm>
#include <limits>

#include <fmt/core.h>

namespace feir {

std::optional<double> SolutionPoint::Metric(const std::string& name) const {
  if (name == "utility") return utility;
  if (name == "utility_norm") return utility_norm;
  if (name == "envy") return envy;
  if (name == "inferiority") return inferiority;
  if (name == "inferiority_norm") return inferiority_norm;
  if (name == "overall_fairness") return envy + inferiority;
  if (name == "overall_norm") return overall_norm;
  if (name == "mean_rank") return mean_rank;
  if (name == "mean_gap") return mean_gap;
  if (name == "gini") return gini;
  throw ArgumentError(fmt::format("unknown metric '{}'", name));
}

SolutionPoint MakeSolutionPoint(std::string method, const MetricsRecord& rec,
                                const MetricsRecord& naive) {
  SolutionPoint p;
  p.method = std::move(method);
  p.k = rec.system.k;
  p.utility = rec.system.utility;
  p.envy = rec.system.envy;
  p.inferiority = rec.system.inferiority;
  const NormalizedMetrics norm = Normalize(rec.system, naive.system);
  p.utility_norm = norm.utility;
  p.inferiority_norm = norm.inferiority;
  p.overall_norm = norm.overall_fairness;
  p.mean_rank = rec.mean_rank;
  p.mean_gap = rec.mean_gap;
  p.gini = rec.gini;
  return p;
}

namespace {

std::vector<FrontPoint> NonDominated(std::vector<FrontPoint> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const FrontPoint& a, const FrontPoint& b) {
              if (a.x != b.x) return a.x < b.x;
              if (a.y != b.y) return a.y > b.y;
              return a.source < b.source;
            });
  std::vector<FrontPoint> front;
  double best_y = -std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    if (p.y > best_y) {
      front.push_back(p);
      best_y = p.y;
    }
  }
  return front;
}

}  // namespace

Front2D ParetoFront(const std::vector<SolutionPoint>& points,
                    const std::string& x_metric, const std::string& y_metric) {
  std::vector<FrontPoint> pts;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].status != "ok") continue;
    const auto x = points[i].Metric(x_metric);
    const auto y = points[i].Metric(y_metric);
    if (x && y) pts.push_back({*x, *y, static_cast<int>(i)});
  }
  if (pts.empty()) {
    throw ArgumentError(
        fmt::format("no point defines both {} and {}", x_metric, y_metric));
  }
  return {x_metric, y_metric, NonDominated(std::move(pts))};
}

Front2D ParetoFront(const std::vector<std::pair<double, double>>& xy) {
  if (xy.empty()) throw ArgumentError("pareto front of an empty set");
  std::vector<FrontPoint> pts;
  pts.reserve(xy.size());
  for (const auto& [x, y] : xy) pts.push_back({x, y, -1});
  return {"x", "y", NonDominated(std::move(pts))};
}

double Hypervolume2D(const Front2D& front, std::pair<double, double> ref) {
  const auto [x_ref, y_ref] = ref;
  std::vector<FrontPoint> inside;
  for (const auto& p : front.points) {
    if (p.x <= x_ref && p.y >= y_ref) inside.push_back(p);
  }
  if (inside.empty()) return 0.0;
  inside = NonDominated(std::move(inside));
  // Ascending x implies ascending y; each point owns the strip up to the next.
  double area = 0.0;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    const double next_x = i + 1 < inside.size() ? inside[i + 1].x : x_ref;
    area += (next_x - inside[i].x) * (inside[i].y - y_ref);
  }
  return area;
}

std::optional<double> MinFairnessAboveThreshold(
    const std::vector<SolutionPoint>& points, const std::string& phi_metric,
    double t) {
  SolutionPoint{}.Metric(phi_metric);  // rejects unknown names
  std::optional<double> best;
  for (const auto& p : points) {
    if (p.status != "ok") continue;
    const auto phi = p.Metric(phi_metric);
    const auto u = p.utility_norm;
    if (!phi || !u || !(*u > t)) continue;
    if (!best || *phi < *best) best = *phi;
  }
  return best;
}

}  // namespace feir
