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
#include "feir/datagen.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <fmt/core.h>

namespace feir {

namespace {

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in the open interval (0, 1).
double OpenUniform(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

enum Stream { kUtility = 0, kSuitability = 1 };

Matrix Draw(const GenSpec& spec, int stream, const Vector& row_shift,
            const Vector& col_shift) {
  Matrix out(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) {
    for (int j = 0; j < spec.n; ++j) {
      out(i, j) = TruncatedNormalAt(spec.seed, stream, i, j,
                                    spec.mean + row_shift(i) + col_shift(j),
                                    spec.stddev);
    }
  }
  return out;
}

}  // namespace

Family ParseFamily(const std::string& name) {
  if (name == "random") return Family::kRandom;
  if (name == "su_pair") return Family::kSuPair;
  if (name == "item_groups") return Family::kItemGroups;
  if (name == "user_groups") return Family::kUserGroups;
  throw ArgumentError(fmt::format("unknown dataset family '{}'", name));
}

std::string ToString(Family family) {
  switch (family) {
    case Family::kRandom:
      return "random";
    case Family::kSuPair:
      return "su_pair";
    case Family::kItemGroups:
      return "item_groups";
    case Family::kUserGroups:
      return "user_groups";
  }
  return "random";
}

GenSpec GenSpec::Defaults(Family family, std::uint64_t seed) {
  GenSpec spec;
  spec.family = family;
  spec.seed = seed;
  switch (family) {
    case Family::kRandom:
      spec.m = 100;
      spec.n = 20;
      break;
    case Family::kSuPair:
      spec.m = 50;
      spec.n = 50;
      break;
    case Family::kItemGroups:
    case Family::kUserGroups:
      spec.m = 20;
      spec.n = 100;
      break;
  }
  return spec;
}

void GenSpec::Validate() const {
  if (m < 2 || n < 2) throw ArgumentError("generator needs m, n >= 2");
  if (!(group_fraction > 0.0 && group_fraction < 1.0)) {
    throw ArgumentError("group_fraction must be in (0, 1)");
  }
  if (!(group_boost > 0.0)) throw ArgumentError("group_boost must be > 0");
  if (!(stddev > 0.0)) throw ArgumentError("stddev must be > 0");
}

int GenSpec::BoostedCount() const {
  const int count = family == Family::kUserGroups ? m : n;
  return static_cast<int>(std::lround(group_fraction * count));
}

double TruncatedNormalAt(std::uint64_t seed, int stream, int i, int j,
                         double mean, double stddev) {
  std::uint64_t h = SplitMix64(seed);
  h = SplitMix64(h ^ static_cast<std::uint64_t>(stream));
  h = SplitMix64(h ^ static_cast<std::uint64_t>(i));
  h = SplitMix64(h ^ static_cast<std::uint64_t>(j));
  const boost::math::normal_distribution<double> normal(mean, stddev);
  const double lo = boost::math::cdf(normal, 0.0);
  const double hi = boost::math::cdf(normal, 1.0);
  double x = boost::math::quantile(normal, lo + OpenUniform(h) * (hi - lo));
  // Keep the support open under rounding.
  if (!(x > 0.0)) x = std::nextafter(0.0, 1.0);
  if (!(x < 1.0)) x = std::nextafter(1.0, 0.0);
  return x;
}

ScorePair GenRandom(const GenSpec& spec) {
  spec.Validate();
  return ScorePair::Shared(
      Draw(spec, kUtility, Vector::Zero(spec.m), Vector::Zero(spec.n)));
}

ScorePair GenSuPair(const GenSpec& spec) {
  spec.Validate();
  const Vector rows = Vector::Zero(spec.m), cols = Vector::Zero(spec.n);
  return ScorePair::Distinct(Draw(spec, kUtility, rows, cols),
                             Draw(spec, kSuitability, rows, cols));
}

ScorePair GenItemGroups(const GenSpec& spec) {
  spec.Validate();
  Vector cols = Vector::Zero(spec.n);
  cols.head(spec.BoostedCount()).setConstant(spec.group_boost);
  return ScorePair::Shared(Draw(spec, kUtility, Vector::Zero(spec.m), cols));
}

ScorePair GenUserGroups(const GenSpec& spec) {
  spec.Validate();
  Vector rows = Vector::Zero(spec.m);
  rows.head(spec.BoostedCount()).setConstant(spec.group_boost);
  return ScorePair::Shared(Draw(spec, kUtility, rows, Vector::Zero(spec.n)));
}

ScorePair Generate(const GenSpec& spec) {
  switch (spec.family) {
    case Family::kRandom:
      return GenRandom(spec);
    case Family::kSuPair:
      return GenSuPair(spec);
    case Family::kItemGroups:
      return GenItemGroups(spec);
    case Family::kUserGroups:
      return GenUserGroups(spec);
  }
  throw ArgumentError("unknown family");
}

}  // namespace feir
