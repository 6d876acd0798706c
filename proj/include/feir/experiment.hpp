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

#include <nlohmann/json.hpp>

#include "feir/baselines.hpp"
#include "feir/datagen.hpp"
#include "feir/pareto.hpp"
#include "feir/trainer.hpp"

namespace feir {

// Either a generator spec or paths to existing score files.
struct DatasetConfig {
  std::optional<GenSpec> generator;
  // False when the generator seed follows the master seed.
  bool seed_pinned = false;
  std::string utility_path;
  std::string suitability_path;  // empty when S = U
};

struct FeirRunConfig {
  std::vector<LossWeights> grid = DefaultWeightGrid();
  TrainConfig train;
  // When non-empty, the learning rate is picked per k by a probe search.
  std::vector<double> lr_candidates;
  int lr_probe_steps = 200;
};

struct ShuffleRunConfig {
  std::vector<int> depths;  // empty: min(3k, n)
};

struct CARunConfig {
  // epsilon = scale / n
  std::vector<double> epsilon_scales = {0.003, 0.01, 0.03, 0.1, 0.3, 1.0};
  int max_iters = 100000;
  double marginal_tol = 1e-9;
};

struct RRRunConfig {
  std::vector<double> taus = {0.0, 0.25, 0.5, 0.75};
  bool exclusive = true;
};

struct ReportConfig {
  std::pair<double, double> fairness_ref = {1.0, 0.95};
  double fairness_threshold = 0.95;
  std::pair<double, double> rank_ref = {50.0, 0.9};
  std::pair<double, double> gap_ref = {0.03, 0.9};
  double competition_threshold = 0.9;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::vector<int> k_values;  // empty: {1, 5, 10, 20, 50, 100} clipped to n
  bool naive = true;
  std::optional<FeirRunConfig> feir;
  std::optional<ShuffleRunConfig> shuffle;
  std::optional<CARunConfig> ca;
  std::optional<RRRunConfig> rr;
  ReportConfig report;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  // All methods enabled with their defaults.
  static ExperimentConfig Defaults();
  void Validate() const;
  std::vector<int> EffectiveKs(int n) const;
};

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);
ExperimentConfig LoadExperimentConfig(const std::string& path);
nlohmann::json ToJson(const ExperimentConfig& config);

// Reproducible per-run seed from the master seed and a run key.
std::uint64_t DeriveSeed(std::uint64_t master, const std::string& key);

// method, parameters and k; the row identity without the seed.
std::string RunKey(const SolutionPoint& point);

// Paths of the score files a run reads.
std::pair<std::string, std::string> DatasetPaths(const ExperimentConfig& c);

// Writes U.csv (and S.csv for distinct pairs) plus sidecars. Returns the
// written paths.
std::vector<std::string> CmdGenerate(const ExperimentConfig& config);

// Evaluates every configured run into <output_dir>/solutions.csv. Rows that
// already exist are kept and not recomputed. Returns the number of new rows.
int CmdRun(const ExperimentConfig& config);

// Writes pareto.csv and hv_table.csv next to the solutions file.
void CmdReport(const std::string& solutions_path, const ReportConfig& config,
               const std::string& output_dir);

extern const char* const kSolutionColumns[];

void WriteSolutions(const std::string& path,
                    const std::vector<SolutionPoint>& points);
// Columns not listed in `required` may be missing. An empty list requires
// every solutions.csv column.
std::vector<SolutionPoint> ReadSolutions(
    const std::string& path, const std::vector<std::string>& required = {});
// Canonical row order: k, method, parameters, seed.
void SortSolutions(std::vector<SolutionPoint>& points);

}  // namespace feir
