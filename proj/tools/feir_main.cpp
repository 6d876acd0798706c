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

// Command-line entry point: generate, run, report, check.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "feir/errors.hpp"
#include "feir/experiment.hpp"
#include "feir/validation.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string output_dir;
  std::string family;
  std::optional<int> m;
  std::optional<int> n;
  std::vector<int> ks;
};

void AddCommonOptions(CLI::App* cmd, Overrides* o) {
  cmd->add_option("-c,--config", o->config_path, "Experiment config (JSON)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o->seed, "Master seed (overrides the config)");
  cmd->add_option("-o,--output-dir", o->output_dir, "Output directory");
}

feir::ExperimentConfig Resolve(const Overrides& o) {
  feir::ExperimentConfig c = o.config_path.empty()
                                 ? feir::ExperimentConfig::Defaults()
                                 : feir::LoadExperimentConfig(o.config_path);
  if (o.seed) {
    c.seed = *o.seed;
    if (c.dataset.generator && !c.dataset.seed_pinned) {
      c.dataset.generator->seed = *o.seed;
    }
  }
  if (!o.family.empty()) {
    const auto family = feir::ParseFamily(o.family);
    c.dataset.generator = feir::GenSpec::Defaults(family, c.seed);
  }
  if (c.dataset.generator) {
    if (o.m) c.dataset.generator->m = *o.m;
    if (o.n) c.dataset.generator->n = *o.n;
  }
  if (!o.output_dir.empty()) c.output_dir = o.output_dir;
  if (!o.ks.empty()) c.k_values = o.ks;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair recommendation post-processing experiments"};
  app.require_subcommand(1);

  Overrides gen_opts;
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  AddCommonOptions(gen, &gen_opts);
  gen->add_option("--family", gen_opts.family,
                  "random, su_pair, item_groups or user_groups");
  gen->add_option("--m", gen_opts.m, "Number of users");
  gen->add_option("--n", gen_opts.n, "Number of items");

  Overrides run_opts;
  auto* run = app.add_subcommand("run", "Evaluate all configured methods");
  AddCommonOptions(run, &run_opts);
  run->add_option("-k,--k", run_opts.ks, "Recommendation list sizes");

  Overrides report_opts;
  std::string solutions_path;
  auto* report = app.add_subcommand("report", "Pareto fronts and HV tables");
  AddCommonOptions(report, &report_opts);
  report->add_option("-s,--solutions", solutions_path,
                     "solutions.csv (default: <output-dir>/solutions.csv)");

  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "Run the validation suites");
  check->add_option("--seed", check_seed, "Seed for random instances");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      for (const auto& path : feir::CmdGenerate(Resolve(gen_opts))) {
        fmt::print("wrote {}\n", path);
      }
    } else if (run->parsed()) {
      const feir::ExperimentConfig c = Resolve(run_opts);
      const int added = feir::CmdRun(c);
      fmt::print("{} new rows in {}/solutions.csv\n", added, c.output_dir);
    } else if (report->parsed()) {
      const feir::ExperimentConfig c = Resolve(report_opts);
      if (solutions_path.empty()) {
        solutions_path =
            (std::filesystem::path(c.output_dir) / "solutions.csv").string();
      }
      feir::CmdReport(solutions_path, c.report, c.output_dir);
      fmt::print("wrote {0}/pareto.csv and {0}/hv_table.csv\n", c.output_dir);
    } else if (check->parsed()) {
      bool all = true;
      for (const auto& r : feir::RunAllChecks(check_seed)) {
        fmt::print("{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
        all = all && r.passed;
      }
      return all ? 0 : 1;
    }
  } catch (const feir::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
