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
#include "feir/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/core.h>

namespace feir {

namespace {

// Unbiased integer in [0, bound) by rejection.
std::uint64_t UniformIndex(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

const char* KindName(Scaling::Kind kind) {
  switch (kind) {
    case Scaling::Kind::kNone:
      return "none";
    case Scaling::Kind::kMinibatch:
      return "minibatch";
    case Scaling::Kind::kUserSample:
      return "user_sample";
    case Scaling::Kind::kItemSample:
      return "item_sample";
    case Scaling::Kind::kUserItemSample:
      return "user_item_sample";
  }
  return "none";
}

}  // namespace

Optimizer ParseOptimizer(const std::string& name) {
  if (name == "gd") return Optimizer::kGradientDescent;
  if (name == "adam") return Optimizer::kAdam;
  throw ArgumentError(fmt::format("unknown optimizer '{}'", name));
}

std::string ToString(Optimizer optimizer) {
  return optimizer == Optimizer::kAdam ? "adam" : "gd";
}

void Scaling::Validate(int m, int n) const {
  auto check = [](int v, int hi, const char* what) {
    if (v < 1 || v > hi) {
      throw ArgumentError(fmt::format("{} = {} outside [1, {}]", what, v, hi));
    }
  };
  switch (kind) {
    case Kind::kNone:
      break;
    case Kind::kMinibatch:
      check(batch_size, m, "batch size b");
      break;
    case Kind::kUserSample:
      check(user_samples, m, "user samples m_s");
      break;
    case Kind::kItemSample:
      check(item_samples, n, "item samples n_s");
      break;
    case Kind::kUserItemSample:
      check(user_samples, m, "user samples m_s");
      check(item_samples, n, "item samples n_s");
      break;
  }
}

void TrainConfig::Validate(int m, int n) const {
  if (!(learning_rate > 0.0)) throw ArgumentError("learning rate must be > 0");
  if (max_steps < 1) throw ArgumentError("max_steps must be >= 1");
  if (k < 1 || k > n) {
    throw ArgumentError(fmt::format("k = {} outside [1, {}]", k, n));
  }
  weights.Validate();
  scaling.Validate(m, n);
}

nlohmann::json ToJson(const Scaling& s) {
  nlohmann::json j{{"kind", KindName(s.kind)}};
  if (s.kind == Scaling::Kind::kMinibatch) j["batch_size"] = s.batch_size;
  if (s.kind == Scaling::Kind::kUserSample ||
      s.kind == Scaling::Kind::kUserItemSample) {
    j["user_samples"] = s.user_samples;
  }
  if (s.kind == Scaling::Kind::kItemSample ||
      s.kind == Scaling::Kind::kUserItemSample) {
    j["item_samples"] = s.item_samples;
  }
  return j;
}

Scaling ScalingFromJson(const nlohmann::json& j) {
  const std::string kind = j.value("kind", "none");
  Scaling s;
  if (kind == "none") {
    s.kind = Scaling::Kind::kNone;
  } else if (kind == "minibatch") {
    s = Scaling::Minibatch(j.at("batch_size").get<int>());
  } else if (kind == "user_sample") {
    s = Scaling::UserSample(j.at("user_samples").get<int>());
  } else if (kind == "item_sample") {
    s = Scaling::ItemSample(j.at("item_samples").get<int>());
  } else if (kind == "user_item_sample") {
    s = Scaling::UserItemSample(j.at("user_samples").get<int>(),
                                j.at("item_samples").get<int>());
  } else {
    throw SchemaError(fmt::format("unknown scaling kind '{}'", kind));
  }
  return s;
}

nlohmann::json ToJson(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"max_steps", c.max_steps},
          {"convergence_tol", c.convergence_tol},
          {"weights", ToJson(c.weights)},
          {"parametrization", ToString(c.parametrization)},
          {"optimizer", ToString(c.optimizer)},
          {"scaling", ToJson(c.scaling)},
          {"seed", c.seed},
          {"k", c.k}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json& j,
                                const TrainConfig& defaults) {
  TrainConfig c = defaults;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.convergence_tol = j.value("convergence_tol", c.convergence_tol);
    if (j.contains("weights")) c.weights = WeightsFromJson(j["weights"]);
    if (j.contains("parametrization")) {
      c.parametrization =
          ParseParametrization(j["parametrization"].get<std::string>());
    }
    if (j.contains("optimizer")) {
      c.optimizer = ParseOptimizer(j["optimizer"].get<std::string>());
    }
    if (j.contains("scaling")) c.scaling = ScalingFromJson(j["scaling"]);
    c.seed = j.value("seed", c.seed);
    c.k = j.value("k", c.k);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("train config: {}", e.what()));
  }
  return c;
}

void TrainTrace::WriteCsv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path));
  out << "step,envy_loss,inferiority_loss,neg_utility_loss,penalty_loss,"
         "total\n";
  for (std::size_t s = 0; s < losses.size(); ++s) {
    const auto& l = losses[s];
    out << fmt::format("{},{},{},{},{},{}\n", s, l.envy, l.inferiority,
                       l.neg_utility, l.penalty, l.total);
  }
}

TrainingViewSampler::TrainingViewSampler(const Scaling& scaling, int users,
                                         int items, std::uint64_t seed)
    : scaling_(scaling), m_(users), n_(items), rng_(seed) {
  scaling_.Validate(m_, n_);
  if (scaling_.kind == Scaling::Kind::kMinibatch) {
    batch_count_ = std::max(1, m_ / scaling_.batch_size);
    permutation_.resize(m_);
  }
}

std::vector<int> TrainingViewSampler::SampleSubset(int population, int count) {
  std::vector<int> pool(population);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(UniformIndex(rng_, population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

TrainingView TrainingViewSampler::Next() {
  TrainingView view;
  switch (scaling_.kind) {
    case Scaling::Kind::kNone:
      break;
    case Scaling::Kind::kMinibatch: {
      const int batch = static_cast<int>(step_ % batch_count_);
      if (batch == 0) {
        std::iota(permutation_.begin(), permutation_.end(), 0);
        for (int i = m_ - 1; i > 0; --i) {
          std::swap(permutation_[i], permutation_[UniformIndex(rng_, i + 1)]);
        }
      }
      const long begin = static_cast<long>(batch) * m_ / batch_count_;
      const long end = static_cast<long>(batch + 1) * m_ / batch_count_;
      std::vector<int> members(permutation_.begin() + begin,
                               permutation_.begin() + end);
      std::sort(members.begin(), members.end());
      view.scope.inferiority_sources = std::move(members);
      break;
    }
    case Scaling::Kind::kUserSample:
      view.users = SampleSubset(m_, scaling_.user_samples);
      break;
    case Scaling::Kind::kItemSample:
      view.items = SampleSubset(n_, scaling_.item_samples);
      break;
    case Scaling::Kind::kUserItemSample:
      view.users = SampleSubset(m_, scaling_.user_samples);
      view.items = SampleSubset(n_, scaling_.item_samples);
      break;
  }
  if (!view.users.empty()) {
    view.scope.users = view.users;
    view.scope.user_normalizer = static_cast<double>(view.users.size());
  }
  if (!view.items.empty()) {
    view.scope.items = view.items;
    view.scope.item_scale =
        static_cast<double>(n_) / static_cast<double>(view.items.size());
  }
  ++step_;
  return view;
}

namespace {

Policy FinalPolicy(const Matrix& params, Parametrization parametrization,
                   int k) {
  if (parametrization == Parametrization::kLogits) {
    return {RowSoftmax(params), k};
  }
  Matrix p = params.cwiseMax(0.0);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    const double sum = p.row(i).sum();
    if (sum > 0.0) {
      p.row(i) /= sum;
    } else {
      p.row(i).setConstant(1.0 / static_cast<double>(p.cols()));
    }
  }
  return {std::move(p), k};
}

}  // namespace

TrainTrace Fit(const ScorePair& scores, const TrainConfig& config) {
  scores.Validate();
  const int m = scores.users(), n = scores.items();
  config.Validate(m, n);
  const auto start = std::chrono::steady_clock::now();
  const bool logits = config.parametrization == Parametrization::kLogits;

  TrainTrace trace;
  trace.params = logits ? scores.utility : RowSoftmax(scores.utility);
  TrainingViewSampler sampler(config.scaling, m, n, config.seed);
  constexpr int kWindow = 10;
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  const bool adam = config.optimizer == Optimizer::kAdam;
  Matrix first, second;
  if (adam) {
    first = Matrix::Zero(m, n);
    second = Matrix::Zero(m, n);
  }
  double beta1_power = 1.0, beta2_power = 1.0;

  Matrix grad;
  for (int step = 0; step < config.max_steps; ++step) {
    const TrainingView view = sampler.Next();
    LossBreakdown loss;
    try {
      const Matrix probs = logits ? RowSoftmax(trace.params) : trace.params;
      loss = EvaluateLoss(scores, probs, config.k, config.weights, view.scope,
                          !logits, &grad);
      if (logits) grad = SoftmaxBackward(probs, grad);
    } catch (const NumericError& e) {
      throw NumericError(fmt::format("training step {}: {}", step, e.what()));
    }
    trace.losses.push_back(loss);
    if (adam) {
      first = kBeta1 * first + (1.0 - kBeta1) * grad;
      second = kBeta2 * second + (1.0 - kBeta2) * grad.cwiseAbs2();
      beta1_power *= kBeta1;
      beta2_power *= kBeta2;
      const double lr = config.learning_rate / (1.0 - beta1_power);
      const double bias2 = 1.0 - beta2_power;
      trace.params.array() -=
          lr * first.array() / ((second.array() / bias2).sqrt() + kAdamEps);
    } else {
      trace.params.noalias() -= config.learning_rate * grad;
    }
    if (!trace.params.allFinite()) {
      throw NumericError(
          fmt::format("training step {}: parameters became non-finite", step));
    }
    if (!logits) trace.params = trace.params.cwiseMax(0.0).cwiseMin(1.0);
    trace.steps = step + 1;

    const auto t = trace.losses.size();
    if (t > kWindow) {
      const double prev = trace.losses[t - 1 - kWindow].total;
      const double rel =
          std::abs(loss.total - prev) / std::max(std::abs(prev), 1e-300);
      if (rel < config.convergence_tol) {
        trace.converged = true;
        break;
      }
    }
  }
  trace.policy = FinalPolicy(trace.params, config.parametrization, config.k);
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return trace;
}

double SearchLearningRate(const ScorePair& scores, const TrainConfig& config,
                          const std::vector<double>& candidates,
                          int probe_steps) {
  if (candidates.empty()) throw ArgumentError("no learning-rate candidates");
  double best_lr = 0.0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (double lr : candidates) {
    TrainConfig probe = config;
    probe.learning_rate = lr;
    probe.max_steps = probe_steps;
    probe.convergence_tol = 0.0;
    try {
      const TrainTrace trace = Fit(scores, probe);
      const double loss = LossAtParams(scores, trace.params, probe.k,
                                       probe.weights, probe.parametrization)
                              .total;
      if (std::isfinite(loss) && loss < best_loss) {
        best_loss = loss;
        best_lr = lr;
      }
    } catch (const NumericError&) {
      continue;
    }
  }
  if (!(best_lr > 0.0)) {
    throw NumericError("every learning-rate candidate diverged");
  }
  return best_lr;
}

std::vector<LossWeights> DefaultWeightGrid() {
  static constexpr double kLevels[] = {0.0, 0.1, 0.3, 1.0, 3.0, 10.0};
  std::vector<LossWeights> grid;
  for (double w1 : kLevels) {
    for (double w2 : kLevels) grid.push_back({w1, w2, 1.0, 0.0});
  }
  return grid;
}

std::vector<SweepEntry> SweepWithRecommendations(
    const ScorePair& scores, const std::vector<LossWeights>& grid,
    const TrainConfig& base_config) {
  if (grid.empty()) throw ArgumentError("empty weight grid");
  const int k = base_config.k;
  const MetricsRecord naive = Evaluate(scores, TopK(scores.utility, k));
  std::vector<SweepEntry> out;
  out.reserve(grid.size());
  for (const LossWeights& w : grid) {
    TrainConfig config = base_config;
    config.weights = w;
    SweepEntry entry;
    try {
      const TrainTrace trace = Fit(scores, config);
      entry.recommendation = TopK(trace.policy.probs, k);
      entry.point = MakeSolutionPoint(
          "feir", Evaluate(scores, entry.recommendation), naive);
    } catch (const Error& e) {
      entry.point = SolutionPoint{};
      entry.point.method = "feir";
      entry.point.k = k;
      entry.point.status = fmt::format("error: {}", e.what());
    }
    entry.point.weights = w;
    entry.point.seed = config.seed;
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<SolutionPoint> Sweep(const ScorePair& scores,
                                 const std::vector<LossWeights>& grid,
                                 const TrainConfig& base_config) {
  std::vector<SolutionPoint> points;
  for (auto& entry : SweepWithRecommendations(scores, grid, base_config)) {
    points.push_back(std::move(entry.point));
  }
  return points;
}

}  // namespace feir
