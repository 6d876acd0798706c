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
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "feir/core.hpp"
#include "feir/losses.hpp"
#include "feir/pareto.hpp"

namespace feir {

// Approximation used to make one training step cheaper on large inputs.
struct Scaling {
  enum class Kind {
    kNone,
    kMinibatch,
    kUserSample,
    kItemSample,
    kUserItemSample
  };

  Kind kind = Kind::kNone;
  int batch_size = 0;    // minibatch
  int user_samples = 0;  // user / user-item sampling
  int item_samples = 0;  // item / user-item sampling

  static Scaling None() { return {}; }
  static Scaling Minibatch(int b) { return {Kind::kMinibatch, b, 0, 0}; }
  static Scaling UserSample(int ms) { return {Kind::kUserSample, 0, ms, 0}; }
  static Scaling ItemSample(int ns) { return {Kind::kItemSample, 0, 0, ns}; }
  static Scaling UserItemSample(int ms, int ns) {
    return {Kind::kUserItemSample, 0, ms, ns};
  }

  void Validate(int m, int n) const;
};

enum class Optimizer { kGradientDescent, kAdam };

Optimizer ParseOptimizer(const std::string& name);  // "gd" or "adam"
std::string ToString(Optimizer optimizer);

struct TrainConfig {
  // Adam step size. Plain gradient descent needs a much larger rate.
  double learning_rate = 0.003;
  int max_steps = 2000;
  // Stop once |L(t) - L(t - 10)| / |L(t - 10)| falls below this.
  double convergence_tol = 1e-6;
  LossWeights weights;
  Parametrization parametrization = Parametrization::kLogits;
  Optimizer optimizer = Optimizer::kAdam;
  Scaling scaling;
  std::uint64_t seed = 0;
  int k = 10;

  void Validate(int m, int n) const;
};

nlohmann::json ToJson(const Scaling& scaling);
Scaling ScalingFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const TrainConfig& config);
// Missing fields keep the values of `defaults`.
TrainConfig TrainConfigFromJson(const nlohmann::json& j,
                                const TrainConfig& defaults = {});

struct TrainTrace {
  std::vector<LossBreakdown> losses;  // loss before each update
  Policy policy;
  Matrix params;
  int steps = 0;
  bool converged = false;
  double wall_seconds = 0.0;

  // step,envy_loss,inferiority_loss,neg_utility_loss,penalty_loss,total
  void WriteCsv(const std::string& path) const;
};

// Users, items and loss scope seen by one optimization step.
struct TrainingView {
  std::vector<int> users;
  std::vector<int> items;
  LossScope scope;
};

// Produces the view for consecutive steps. Mini-batches partition a fresh
// user permutation every epoch; sampled subsets are redrawn every step.
class TrainingViewSampler {
 public:
  TrainingViewSampler(const Scaling& scaling, int users, int items,
                      std::uint64_t seed);

  TrainingView Next();

 private:
  std::vector<int> SampleSubset(int population, int count);

  Scaling scaling_;
  int m_;
  int n_;
  std::mt19937_64 rng_;
  std::vector<int> permutation_;
  int batch_count_ = 1;
  long step_ = 0;
};

// First-order descent on the policy starting from logits equal to the
// utility scores. Throws NumericError naming the step when the loss turns
// non-finite.
TrainTrace Fit(const ScorePair& scores, const TrainConfig& config);

// Picks the candidate learning rate whose short probe run reaches the lowest
// total loss without diverging.
double SearchLearningRate(const ScorePair& scores, const TrainConfig& config,
                          const std::vector<double>& candidates,
                          int probe_steps);

// w1, w2 in {0, 0.1, 0.3, 1, 3, 10}, w3 = 1, w4 = 0.
std::vector<LossWeights> DefaultWeightGrid();

struct SweepEntry {
  SolutionPoint point;
  CountMatrix recommendation;  // empty when the fit failed
};

// One fit per weight vector, each evaluated by deterministic top-k.
std::vector<SweepEntry> SweepWithRecommendations(
    const ScorePair& scores, const std::vector<LossWeights>& grid,
    const TrainConfig& base_config);
std::vector<SolutionPoint> Sweep(const ScorePair& scores,
                                 const std::vector<LossWeights>& grid,
                                 const TrainConfig& base_config);

}  // namespace feir
