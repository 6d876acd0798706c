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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <fmt/core.h>

#include "feir/core.hpp"
#include "feir/metrics.hpp"

namespace feir {

namespace {

std::vector<int> AllIndices(int count) {
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

void CheckPairArgs(int i, int i_star, const Matrix& a, const Matrix& probs) {
  if (a.rows() != probs.rows() || a.cols() != probs.cols()) {
    throw DimensionError(fmt::format("scores {}x{} vs policy {}x{}", a.rows(),
                                     a.cols(), probs.rows(), probs.cols()));
  }
  const int m = static_cast<int>(a.rows());
  if (i < 0 || i >= m || i_star < 0 || i_star >= m) {
    throw ArgumentError(
        fmt::format("user pair ({}, {}) out of range", i, i_star));
  }
  if (i == i_star) {
    throw ArgumentError("pairwise expectation needs i != i_star");
  }
}

// 1 - (1 - p)^k and its derivative k (1 - p)^(k - 1).
inline double HitProbability(double p, int k) {
  return 1.0 - PowOneMinus(p, k);
}
inline double HitDerivative(double p, int k) {
  return k * PowOneMinus(p, k - 1);
}

}  // namespace

void LossWeights::Validate() const {
  if (envy < 0 || inferiority < 0 || utility < 0 || penalty < 0) {
    throw ArgumentError("loss weights must be non-negative");
  }
  if (envy == 0 && inferiority == 0 && utility == 0) {
    throw ArgumentError(
        "at least one of the envy, inferiority and utility weights must be "
        "positive");
  }
}

nlohmann::json ToJson(const LossBreakdown& loss) {
  return {{"envy_loss", loss.envy},
          {"inferiority_loss", loss.inferiority},
          {"neg_utility_loss", loss.neg_utility},
          {"penalty_loss", loss.penalty},
          {"total", loss.total}};
}

nlohmann::json ToJson(const LossWeights& w) {
  return nlohmann::json::array({w.envy, w.inferiority, w.utility, w.penalty});
}

LossWeights WeightsFromJson(const nlohmann::json& j) {
  LossWeights w;
  if (j.is_array()) {
    if (j.size() != 4) throw SchemaError("weights array needs 4 entries");
    w = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
         j[3].get<double>()};
  } else {
    w.envy = j.value("w1", 0.0);
    w.inferiority = j.value("w2", 0.0);
    w.utility = j.value("w3", 1.0);
    w.penalty = j.value("w4", 0.0);
  }
  return w;
}

Parametrization ParseParametrization(const std::string& name) {
  if (name == "logits") return Parametrization::kLogits;
  if (name == "direct") return Parametrization::kDirect;
  throw ArgumentError(fmt::format("unknown parametrization '{}'", name));
}

std::string ToString(Parametrization p) {
  return p == Parametrization::kLogits ? "logits" : "direct";
}

double PowOneMinus(double p, int k) {
  if (k == 0) return 1.0;
  if (p > 1.0 - 1e-12 && p < 1.0) return std::exp(k * std::log1p(-p));
  double base = 1.0 - p;
  double result = 1.0;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) result *= base;
    base *= base;
  }
  return result;
}

double ExpectedUserUtility(int i, const Matrix& utility, const Matrix& probs,
                           int k) {
  if (i < 0 || i >= probs.rows()) {
    throw ArgumentError(fmt::format("user {} out of range", i));
  }
  return k * utility.row(i).dot(probs.row(i));
}

double ExpectedPairEnvy(int i, int i_star, const Matrix& utility,
                        const Matrix& probs, int k) {
  CheckPairArgs(i, i_star, utility, probs);
  double s = 0.0;
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    s += (probs(i_star, j) - probs(i, j)) * utility(i, j);
  }
  return k * s;
}

double ExpectedPairInferiority(int i, int i_star, const Matrix& suitability,
                               const Matrix& probs, int k) {
  CheckPairArgs(i, i_star, suitability, probs);
  double s = 0.0;
  for (Eigen::Index j = 0; j < probs.cols(); ++j) {
    const double gap = suitability(i_star, j) - suitability(i, j);
    if (gap <= 0.0) continue;
    s += gap * HitProbability(probs(i, j), k) *
         HitProbability(probs(i_star, j), k);
  }
  return s;
}

SystemLosses ComputeSystemLosses(const Matrix& utility,
                                 const Matrix& suitability, const Matrix& probs,
                                 int k) {
  if (utility.rows() != probs.rows() || utility.cols() != probs.cols() ||
      suitability.rows() != probs.rows() ||
      suitability.cols() != probs.cols()) {
    throw DimensionError("score and policy shapes differ");
  }
  const int m = static_cast<int>(probs.rows());
  SystemLosses out;
  for (int i = 0; i < m; ++i) {
    out.neg_utility -= ExpectedUserUtility(i, utility, probs, k);
    for (int r = 0; r < m; ++r) {
      if (r == i) continue;
      out.envy += std::max(0.0, ExpectedPairEnvy(i, r, utility, probs, k));
      out.inferiority += ExpectedPairInferiority(i, r, suitability, probs, k);
    }
  }
  out.neg_utility /= m;
  out.envy /= m;
  out.inferiority /= m;
  return out;
}

double PenaltyLoss(const Matrix& p_raw) {
  if (!p_raw.allFinite()) throw NumericError("penalty of non-finite matrix");
  return (p_raw.rowwise().sum().array() - 1.0).square().sum();
}

LossBreakdown EvaluateLoss(const ScorePair& scores, const Matrix& probs, int k,
                           const LossWeights& weights, const LossScope& scope,
                           bool with_penalty, Matrix* grad_probs) {
  const int m = scores.users(), n = scores.items();
  if (probs.rows() != m || probs.cols() != n) {
    throw DimensionError(fmt::format("policy is {}x{}, scores are {}x{}",
                                     probs.rows(), probs.cols(), m, n));
  }
  const std::vector<int> users =
      scope.users.empty() ? AllIndices(m) : scope.users;
  const std::vector<int> items =
      scope.items.empty() ? AllIndices(n) : scope.items;
  const std::vector<int>& sources =
      scope.inferiority_sources.empty() ? users : scope.inferiority_sources;
  const double norm =
      scope.user_normalizer > 0.0 ? scope.user_normalizer : double(m);
  const double scale = scope.item_scale;
  const int mu = static_cast<int>(users.size());
  const int ni = static_cast<int>(items.size());

  Matrix us(mu, ni), ps(mu, ni);
  for (int a = 0; a < mu; ++a) {
    for (int b = 0; b < ni; ++b) {
      us(a, b) = scores.utility(users[a], items[b]);
      ps(a, b) = probs(users[a], items[b]);
    }
  }

  LossBreakdown out;
  Matrix grad_s;
  if (grad_probs) grad_s = Matrix::Zero(mu, ni);

  // Negative expected utility.
  const Vector own = (us.cwiseProduct(ps)).rowwise().sum();
  out.neg_utility = -k * scale * own.sum() / norm;
  if (grad_probs) grad_s.noalias() -= (weights.utility * k * scale / norm) * us;

  // Expected envy; cross(a, b) = sum_j U(a, j) P(b, j).
  const Matrix cross = us * ps.transpose();
  Matrix active = Matrix::Zero(mu, mu);
  double envy_sum = 0.0;
  for (int a = 0; a < mu; ++a) {
    for (int b = 0; b < mu; ++b) {
      if (a == b) continue;
      const double e = k * scale * (cross(a, b) - cross(a, a));
      if (e > 0.0) {
        envy_sum += e;
        active(a, b) = 1.0;
      }
    }
  }
  out.envy = envy_sum / norm;
  if (grad_probs && weights.envy != 0.0) {
    const Vector envious = active.rowwise().sum();
    grad_s.noalias() += (weights.envy * k * scale / norm) *
                        (active.transpose() * us - envious.asDiagonal() * us);
  }

  // Expected inferiority over (source, rival) pairs.
  Matrix hit(m, ni), dhit;
  for (int i = 0; i < m; ++i) {
    for (int b = 0; b < ni; ++b) {
      hit(i, b) = HitProbability(probs(i, items[b]), k);
    }
  }
  if (grad_probs) dhit = Matrix::Zero(m, ni);
  double inferiority_sum = 0.0;
  for (int b = 0; b < ni; ++b) {
    const int j = items[b];
    for (int i : sources) {
      const double s_i = scores.suitability(i, j);
      for (int r : users) {
        if (r == i) continue;
        const double gap = scores.suitability(r, j) - s_i;
        if (gap <= 0.0) continue;
        inferiority_sum += gap * hit(i, b) * hit(r, b);
        if (grad_probs) {
          dhit(i, b) += gap * hit(r, b);
          dhit(r, b) += gap * hit(i, b);
        }
      }
    }
  }
  out.inferiority = scale * inferiority_sum / norm;

  if (with_penalty) out.penalty = PenaltyLoss(probs);

  out.total = weights.envy * out.envy + weights.inferiority * out.inferiority +
              weights.utility * out.neg_utility;
  if (with_penalty) out.total += weights.penalty * out.penalty;

  if (grad_probs) {
    grad_probs->setZero(m, n);
    for (int a = 0; a < mu; ++a) {
      for (int b = 0; b < ni; ++b) {
        (*grad_probs)(users[a], items[b]) = grad_s(a, b);
      }
    }
    if (weights.inferiority != 0.0) {
      const double c = weights.inferiority * scale / norm;
      for (int i = 0; i < m; ++i) {
        for (int b = 0; b < ni; ++b) {
          if (dhit(i, b) == 0.0) continue;
          const int j = items[b];
          (*grad_probs)(i, j) += c * dhit(i, b) * HitDerivative(probs(i, j), k);
        }
      }
    }
    if (with_penalty && weights.penalty != 0.0) {
      const Vector excess = probs.rowwise().sum().array() - 1.0;
      grad_probs->colwise() += (2.0 * weights.penalty) * excess;
    }
  }
  if (!std::isfinite(out.total)) {
    throw NumericError(fmt::format(
        "non-finite loss: envy={} inferiority={} neg_utility={} penalty={}",
        out.envy, out.inferiority, out.neg_utility, out.penalty));
  }
  return out;
}

LossBreakdown TotalLoss(const ScorePair& scores, const Matrix& probs, int k,
                        const LossWeights& weights) {
  return EvaluateLoss(scores, probs, k, weights, {}, true, nullptr);
}

LossBreakdown LossAtParams(const ScorePair& scores, const Matrix& params, int k,
                           const LossWeights& weights,
                           Parametrization parametrization,
                           const LossScope& scope) {
  if (parametrization == Parametrization::kLogits) {
    return EvaluateLoss(scores, RowSoftmax(params), k, weights, scope, false,
                        nullptr);
  }
  return EvaluateLoss(scores, params, k, weights, scope, true, nullptr);
}

Matrix SoftmaxBackward(const Matrix& probs, const Matrix& grad_probs) {
  const Vector inner = probs.cwiseProduct(grad_probs).rowwise().sum();
  return probs.cwiseProduct(grad_probs.colwise() - inner);
}

Matrix GradTotalLoss(const ScorePair& scores, const Matrix& params, int k,
                     const LossWeights& weights,
                     Parametrization parametrization, const LossScope& scope) {
  Matrix grad;
  if (parametrization == Parametrization::kLogits) {
    const Matrix probs = RowSoftmax(params);
    EvaluateLoss(scores, probs, k, weights, scope, false, &grad);
    return SoftmaxBackward(probs, grad);
  }
  EvaluateLoss(scores, params, k, weights, scope, true, &grad);
  return grad;
}

Matrix FiniteDiffGrad(const std::function<double(const Matrix&)>& loss,
                      const Matrix& params, double h) {
  if (!(h > 0.0)) throw ArgumentError("finite-difference step must be > 0");
  Matrix x = params;
  Matrix grad(params.rows(), params.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double orig = x(i, j);
      x(i, j) = orig + h;
      const double up = loss(x);
      x(i, j) = orig - h;
      const double down = loss(x);
      x(i, j) = orig;
      grad(i, j) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

MonteCarloEstimate EstimateByMonteCarlo(const ScorePair& scores,
                                        const Matrix& probs, int k, int samples,
                                        std::uint64_t seed) {
  if (samples < 1) throw ArgumentError("need at least one sample");
  const Policy policy{probs, k};
  policy.Validate();
  const int m = policy.users();

  // Moments are accumulated around the first draw so a degenerate policy
  // reports an exactly zero standard error.
  struct Moments {
    double shift = 0.0, sum = 0.0, sq = 0.0;
    void Add(double x, bool first) {
      if (first) shift = x;
      sum += x - shift;
      sq += (x - shift) * (x - shift);
    }
  };
  std::vector<Moments> u_acc(m), e_acc(m * m), f_acc(m * m);
  Matrix pos_sum = Matrix::Zero(m, m);

  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const CountMatrix c = SampleRecommendations(policy, rng);
    for (int i = 0; i < m; ++i) {
      u_acc[i].Add(UserUtility(i, scores.utility, c), s == 0);
      for (int r = 0; r < m; ++r) {
        if (r == i) continue;
        const double e = UserEnvy(i, r, scores.utility, c);
        e_acc[i * m + r].Add(e, s == 0);
        pos_sum(i, r) += std::max(0.0, e);
        f_acc[i * m + r].Add(UserInferiority(i, r, scores.suitability, c),
                             s == 0);
      }
    }
  }

  const double count = samples;
  const auto mean_of = [&](const Moments& a) {
    return a.shift + a.sum / count;
  };
  const auto stderr_of = [&](const Moments& a) {
    if (samples < 2) return 0.0;
    const double var =
        std::max(0.0, (a.sq - a.sum * a.sum / count) / (count - 1));
    return std::sqrt(var / count);
  };

  MonteCarloEstimate est;
  est.samples = samples;
  est.utility.resize(m);
  est.utility_se.resize(m);
  est.envy = Matrix::Zero(m, m);
  est.envy_se = Matrix::Zero(m, m);
  est.positive_envy = pos_sum / count;
  est.inferiority = Matrix::Zero(m, m);
  est.inferiority_se = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    est.utility(i) = mean_of(u_acc[i]);
    est.utility_se(i) = stderr_of(u_acc[i]);
    for (int r = 0; r < m; ++r) {
      if (r == i) continue;
      est.envy(i, r) = mean_of(e_acc[i * m + r]);
      est.envy_se(i, r) = stderr_of(e_acc[i * m + r]);
      est.inferiority(i, r) = mean_of(f_acc[i * m + r]);
      est.inferiority_se(i, r) = stderr_of(f_acc[i * m + r]);
    }
  }
  return est;
}

}  // namespace feir
