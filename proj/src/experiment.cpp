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
#include "feir/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/core.h>

#include "feir/core.hpp"
#include "feir/errors.hpp"
#include "feir/metrics.hpp"

namespace feir {

namespace fs = std::filesystem;

const char* const kSolutionColumns[] = {
    "method",       "w1",          "w2",
    "w3",           "w4",          "d",
    "epsilon",      "tau",         "k",
    "seed",         "utility",     "utility_norm",
    "envy",         "inferiority", "inferiority_norm",
    "overall_norm", "mean_rank",   "mean_gap",
    "gini",         "status"};

namespace {

constexpr int kColumnCount =
    sizeof(kSolutionColumns) / sizeof(kSolutionColumns[0]);
constexpr const char* kAbsent = "—";

// ---- configuration -------------------------------------------------------

GenSpec GenSpecFromJson(const nlohmann::json& j, std::uint64_t master_seed) {
  const Family family = ParseFamily(j.at("family").get<std::string>());
  GenSpec s = GenSpec::Defaults(family, j.value("seed", master_seed));
  s.m = j.value("m", s.m);
  s.n = j.value("n", s.n);
  s.group_fraction = j.value("group_fraction", s.group_fraction);
  s.group_boost = j.value("group_boost", s.group_boost);
  s.mean = j.value("mean", s.mean);
  s.stddev = j.value("stddev", s.stddev);
  return s;
}

nlohmann::json ToJson(const GenSpec& s) {
  return {{"family", ToString(s.family)},
          {"m", s.m},
          {"n", s.n},
          {"seed", s.seed},
          {"group_fraction", s.group_fraction},
          {"group_boost", s.group_boost},
          {"mean", s.mean},
          {"stddev", s.stddev}};
}

std::pair<double, double> RefFromJson(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw SchemaError("reference point must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

// Method sections: absent or false disables, true enables with defaults.
bool Enabled(const nlohmann::json& methods, const char* name) {
  if (!methods.contains(name)) return false;
  const auto& v = methods[name];
  return !(v.is_boolean() && !v.get<bool>()) && !v.is_null();
}

const nlohmann::json& Section(const nlohmann::json& methods, const char* name) {
  static const nlohmann::json kEmpty = nlohmann::json::object();
  const auto& v = methods[name];
  return v.is_object() ? v : kEmpty;
}

// ---- csv -----------------------------------------------------------------

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

// Shortest round-trip form; NaN marks a metric a failed run never produced.
std::string Num(double v) {
  return std::isnan(v) ? std::string() : fmt::format("{}", v);
}

std::string Num(const std::optional<double>& v) {
  return v ? Num(*v) : std::string();
}

std::optional<double> ParseOptional(const std::string& s, const char* column,
                                    int line) {
  if (s.empty() || s == kAbsent) return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(fmt::format("bad value '{}' in column {}", s, column),
                     line, 0);
  }
}

std::string ToRow(const SolutionPoint& p) {
  std::vector<std::string> f;
  f.reserve(kColumnCount);
  f.push_back(CsvField(p.method));
  if (p.weights) {
    for (double w : {p.weights->envy, p.weights->inferiority,
                     p.weights->utility, p.weights->penalty}) {
      f.push_back(Num(w));
    }
  } else {
    f.insert(f.end(), 4, "");
  }
  f.push_back(p.d ? std::to_string(*p.d) : "");
  f.push_back(Num(p.epsilon));
  f.push_back(Num(p.tau));
  f.push_back(std::to_string(p.k));
  f.push_back(std::to_string(p.seed));
  f.push_back(Num(p.utility));
  f.push_back(Num(p.utility_norm));
  f.push_back(Num(p.envy));
  f.push_back(Num(p.inferiority));
  f.push_back(Num(p.inferiority_norm));
  f.push_back(Num(p.overall_norm));
  f.push_back(Num(p.mean_rank));
  f.push_back(Num(p.mean_gap));
  f.push_back(Num(p.gini));
  f.push_back(CsvField(p.status));
  std::string row;
  for (int i = 0; i < kColumnCount; ++i) {
    if (i) row += ',';
    row += f[i];
  }
  return row + "\n";
}

std::string Header() {
  std::string h;
  for (int i = 0; i < kColumnCount; ++i) {
    if (i) h += ',';
    h += kSolutionColumns[i];
  }
  return h + "\n";
}

int MethodRank(const std::string& method) {
  static const std::map<std::string, int> kOrder = {
      {"naive", 0}, {"feir", 1}, {"shuffle", 2}, {"ca", 3}, {"rr", 4}};
  const auto it = kOrder.find(method);
  return it == kOrder.end() ? 5 : it->second;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path));
  out << text;
  if (!out) throw IoError(fmt::format("write to {} failed", path));
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError(fmt::format("cannot create output directory {}", dir));
  }
}

// ---- runs ----------------------------------------------------------------

SolutionPoint FailedPoint(SolutionPoint point, const std::string& why) {
  SolutionPoint p;
  p.method = point.method;
  p.weights = point.weights;
  p.d = point.d;
  p.epsilon = point.epsilon;
  p.tau = point.tau;
  p.k = point.k;
  p.seed = point.seed;
  p.utility = std::numeric_limits<double>::quiet_NaN();
  p.envy = p.inferiority = p.mean_rank = p.mean_gap = p.gini = p.utility;
  p.status = "error: " + why;
  return p;
}

SolutionPoint Evaluated(const SolutionPoint& proto, const ScorePair& scores,
                        const CountMatrix& rec, const MetricsRecord& naive) {
  SolutionPoint p =
      MakeSolutionPoint(proto.method, Evaluate(scores, rec), naive);
  p.weights = proto.weights;
  p.d = proto.d;
  p.epsilon = proto.epsilon;
  p.tau = proto.tau;
  p.seed = proto.seed;
  return p;
}

}  // namespace

// ---- ExperimentConfig ----------------------------------------------------

ExperimentConfig ExperimentConfig::Defaults() {
  ExperimentConfig c;
  c.dataset.generator = GenSpec::Defaults(Family::kUserGroups, 0);
  c.feir = FeirRunConfig{};
  c.shuffle = ShuffleRunConfig{};
  c.ca = CARunConfig{};
  c.rr = RRRunConfig{};
  return c;
}

void ExperimentConfig::Validate() const {
  if (!naive && !feir && !shuffle && !ca && !rr) {
    throw ArgumentError("no method enabled");
  }
  if (dataset.generator) {
    dataset.generator->Validate();
  } else {
    if (dataset.utility_path.empty()) {
      throw ArgumentError("dataset needs a generator or a utility path");
    }
    for (const auto& path : {dataset.utility_path, dataset.suitability_path}) {
      if (!path.empty() && !fs::is_regular_file(path)) {
        throw IoError(fmt::format("dataset file {} not found", path));
      }
    }
  }
  for (int k : k_values) {
    if (k < 1) throw ArgumentError(fmt::format("k = {} must be >= 1", k));
  }
  if (feir) {
    if (feir->grid.empty()) throw ArgumentError("empty FEIR weight grid");
    for (const auto& w : feir->grid) w.Validate();
    for (double lr : feir->lr_candidates) {
      if (!(lr > 0.0)) throw ArgumentError("learning rates must be > 0");
    }
  }
  if (ca) {
    for (double s : ca->epsilon_scales) {
      if (!(s > 0.0)) throw ArgumentError("epsilon scales must be > 0");
    }
  }
  if (rr) {
    for (double tau : rr->taus) RRConfig{tau, 0, rr->exclusive}.Validate();
  }
  if (output_dir.empty()) throw ArgumentError("empty output directory");
}

std::vector<int> ExperimentConfig::EffectiveKs(int n) const {
  std::vector<int> ks =
      k_values.empty() ? std::vector<int>{1, 5, 10, 20, 50, 100} : k_values;
  for (int& k : ks) k = std::min(k, n);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j) {
  ExperimentConfig c;
  try {
    c.seed = j.value("seed", std::uint64_t{0});
    c.output_dir = j.value("output_dir", c.output_dir);
    c.k_values = j.value("k", std::vector<int>{});

    const auto& ds = j.at("dataset");
    if (ds.contains("family")) {
      c.dataset.generator = GenSpecFromJson(ds, c.seed);
      c.dataset.seed_pinned = ds.contains("seed");
    } else {
      c.dataset.utility_path = ds.at("utility").get<std::string>();
      c.dataset.suitability_path = ds.value("suitability", "");
    }

    if (!j.contains("methods")) {
      const ExperimentConfig d = ExperimentConfig::Defaults();
      c.feir = d.feir;
      c.shuffle = d.shuffle;
      c.ca = d.ca;
      c.rr = d.rr;
    } else {
      const auto& m = j["methods"];
      c.naive = m.value("naive", true);
      if (Enabled(m, "feir")) {
        const auto& s = Section(m, "feir");
        FeirRunConfig f;
        if (s.contains("grid")) {
          f.grid.clear();
          for (const auto& w : s["grid"]) f.grid.push_back(WeightsFromJson(w));
        }
        if (s.contains("train")) f.train = TrainConfigFromJson(s["train"]);
        f.lr_candidates = s.value("lr_candidates", f.lr_candidates);
        f.lr_probe_steps = s.value("lr_probe_steps", f.lr_probe_steps);
        c.feir = f;
      }
      if (Enabled(m, "shuffle")) {
        c.shuffle = ShuffleRunConfig{
            Section(m, "shuffle").value("d", std::vector<int>{})};
      }
      if (Enabled(m, "ca")) {
        const auto& s = Section(m, "ca");
        CARunConfig ca;
        ca.epsilon_scales = s.value("epsilon_scales", ca.epsilon_scales);
        ca.max_iters = s.value("max_iters", ca.max_iters);
        ca.marginal_tol = s.value("marginal_tol", ca.marginal_tol);
        c.ca = ca;
      }
      if (Enabled(m, "rr")) {
        const auto& s = Section(m, "rr");
        RRRunConfig rr;
        rr.taus = s.value("tau", rr.taus);
        rr.exclusive = s.value("exclusive", rr.exclusive);
        c.rr = rr;
      }
    }

    if (j.contains("report")) {
      const auto& r = j["report"];
      if (r.contains("fairness_ref")) {
        c.report.fairness_ref = RefFromJson(r["fairness_ref"]);
      }
      if (r.contains("rank_ref")) {
        c.report.rank_ref = RefFromJson(r["rank_ref"]);
      }
      if (r.contains("gap_ref")) c.report.gap_ref = RefFromJson(r["gap_ref"]);
      c.report.fairness_threshold =
          r.value("fairness_threshold", c.report.fairness_threshold);
      c.report.competition_threshold =
          r.value("competition_threshold", c.report.competition_threshold);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("experiment config: {}", e.what()));
  }
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config {}", path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(fmt::format("config {}: {}", path, e.what()));
  }
  return ExperimentConfigFromJson(j);
}

nlohmann::json ToJson(const ExperimentConfig& c) {
  nlohmann::json j;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["k"] = c.k_values;
  if (c.dataset.generator) {
    j["dataset"] = ToJson(*c.dataset.generator);
  } else {
    j["dataset"] = {{"utility", c.dataset.utility_path},
                    {"suitability", c.dataset.suitability_path}};
  }
  nlohmann::json m;
  m["naive"] = c.naive;
  if (c.feir) {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& w : c.feir->grid) grid.push_back(ToJson(w));
    m["feir"] = {{"grid", grid},
                 {"train", ToJson(c.feir->train)},
                 {"lr_candidates", c.feir->lr_candidates},
                 {"lr_probe_steps", c.feir->lr_probe_steps}};
  }
  if (c.shuffle) m["shuffle"] = {{"d", c.shuffle->depths}};
  if (c.ca) {
    m["ca"] = {{"epsilon_scales", c.ca->epsilon_scales},
               {"max_iters", c.ca->max_iters},
               {"marginal_tol", c.ca->marginal_tol}};
  }
  if (c.rr) m["rr"] = {{"tau", c.rr->taus}, {"exclusive", c.rr->exclusive}};
  j["methods"] = m;
  const auto ref = [](std::pair<double, double> r) {
    return nlohmann::json::array({r.first, r.second});
  };
  j["report"] = {{"fairness_ref", ref(c.report.fairness_ref)},
                 {"fairness_threshold", c.report.fairness_threshold},
                 {"rank_ref", ref(c.report.rank_ref)},
                 {"gap_ref", ref(c.report.gap_ref)},
                 {"competition_threshold", c.report.competition_threshold}};
  return j;
}

// ---- seeds and keys ------------------------------------------------------

std::uint64_t DeriveSeed(std::uint64_t master, const std::string& key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = master ^ h;  // SplitMix64 finalizer
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string RunKey(const SolutionPoint& p) {
  std::string key = p.method;
  if (p.weights) {
    key +=
        fmt::format("|w={},{},{},{}", p.weights->envy, p.weights->inferiority,
                    p.weights->utility, p.weights->penalty);
  }
  if (p.d) key += fmt::format("|d={}", *p.d);
  if (p.epsilon) key += fmt::format("|eps={}", *p.epsilon);
  if (p.tau) key += fmt::format("|tau={}", *p.tau);
  return key + fmt::format("|k={}", p.k);
}

// ---- solutions.csv -------------------------------------------------------

void SortSolutions(std::vector<SolutionPoint>& points) {
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  const auto key = [&](const SolutionPoint& p) {
    const LossWeights w =
        p.weights.value_or(LossWeights{kNone, kNone, kNone, kNone});
    return std::make_tuple(p.k, MethodRank(p.method), p.method, w.envy,
                           w.inferiority, w.utility, w.penalty,
                           p.d.value_or(-1), p.epsilon.value_or(kNone),
                           p.tau.value_or(kNone), p.seed);
  };
  std::stable_sort(points.begin(), points.end(),
                   [&](const SolutionPoint& a, const SolutionPoint& b) {
                     return key(a) < key(b);
                   });
}

void WriteSolutions(const std::string& path,
                    const std::vector<SolutionPoint>& points) {
  std::string text = Header();
  for (const auto& p : points) text += ToRow(p);
  WriteText(path, text);
}

std::vector<SolutionPoint> ReadSolutions(
    const std::string& path, const std::vector<std::string>& required) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  // A run killed mid-write can leave a partial last line.
  if (!text.empty() && text.back() != '\n') {
    text.erase(text.rfind('\n') == std::string::npos ? 0
                                                     : text.rfind('\n') + 1);
  }

  std::vector<std::string> lines;
  std::istringstream ls(text);
  for (std::string line; std::getline(ls, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (lines.empty()) throw FormatError(fmt::format("{} is empty", path));

  const std::vector<std::string> header = SplitCsvLine(lines[0]);
  std::map<std::string, int> col;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) col[header[i]] = i;
  std::vector<std::string> need = required;
  if (need.empty()) {
    need.assign(kSolutionColumns, kSolutionColumns + kColumnCount);
  }
  for (const auto& name : need) {
    if (!col.count(name)) {
      throw SchemaError(fmt::format("{}: missing column '{}'", path, name));
    }
  }

  std::vector<SolutionPoint> points;
  for (int li = 1; li < static_cast<int>(lines.size()); ++li) {
    if (lines[li].empty()) continue;
    const auto f = SplitCsvLine(lines[li]);
    if (f.size() != header.size()) {
      throw ParseError(fmt::format("{}: expected {} fields, got {}", path,
                                   header.size(), f.size()),
                       li + 1, 0);
    }
    const auto get = [&](const char* name) -> std::string {
      const auto it = col.find(name);
      return it == col.end() ? std::string() : f[it->second];
    };
    const auto opt = [&](const char* name) {
      return ParseOptional(get(name), name, li + 1);
    };
    const auto num = [&](const char* name) {
      return opt(name).value_or(std::numeric_limits<double>::quiet_NaN());
    };
    SolutionPoint p;
    p.method = get("method");
    const auto w1 = opt("w1"), w2 = opt("w2"), w3 = opt("w3"), w4 = opt("w4");
    if (w1 && w2 && w3 && w4) p.weights = LossWeights{*w1, *w2, *w3, *w4};
    if (const auto d = opt("d")) p.d = static_cast<int>(*d);
    p.epsilon = opt("epsilon");
    p.tau = opt("tau");
    p.k = static_cast<int>(opt("k").value_or(0));
    const std::string seed = get("seed");
    try {
      p.seed = seed.empty() ? 0 : std::stoull(seed);
    } catch (const std::exception&) {
      throw ParseError(fmt::format("bad seed '{}'", seed), li + 1, 0);
    }
    p.utility = num("utility");
    p.utility_norm = opt("utility_norm");
    p.envy = num("envy");
    p.inferiority = num("inferiority");
    p.inferiority_norm = opt("inferiority_norm");
    p.overall_norm = opt("overall_norm");
    p.mean_rank = num("mean_rank");
    p.mean_gap = num("mean_gap");
    p.gini = num("gini");
    p.status = col.count("status") ? get("status") : "ok";
    points.push_back(std::move(p));
  }
  return points;
}

// ---- commands ------------------------------------------------------------

std::pair<std::string, std::string> DatasetPaths(const ExperimentConfig& c) {
  if (!c.dataset.generator) {
    return {c.dataset.utility_path, c.dataset.suitability_path};
  }
  const fs::path dir(c.output_dir);
  const bool distinct = c.dataset.generator->family == Family::kSuPair;
  return {(dir / "U.csv").string(),
          distinct ? (dir / "S.csv").string() : std::string()};
}

std::vector<std::string> CmdGenerate(const ExperimentConfig& config) {
  if (!config.dataset.generator) {
    throw ArgumentError("dataset is file-based; nothing to generate");
  }
  const GenSpec& spec = *config.dataset.generator;
  spec.Validate();
  EnsureDir(config.output_dir);
  const ScorePair scores = Generate(spec);
  const auto [u_path, s_path] = DatasetPaths(config);

  MatrixMeta meta{spec.m, spec.n, std::nullopt, spec.seed,
                  ToString(spec.family)};
  std::vector<std::string> written;
  SaveMatrix(scores.utility, u_path);
  SaveMeta(meta, u_path);
  written.push_back(u_path);
  const fs::path stale = fs::path(config.output_dir) / "S.csv";
  if (!s_path.empty()) {
    SaveMatrix(scores.suitability, s_path);
    SaveMeta(meta, s_path);
    written.push_back(s_path);
  } else if (fs::exists(stale)) {
    fs::remove(stale);
    fs::remove(SidecarPath(stale.string()));
  }
  return written;
}

int CmdRun(const ExperimentConfig& config) {
  config.Validate();
  const auto [u_path, s_path] = DatasetPaths(config);
  if (!fs::is_regular_file(u_path)) {
    throw IoError(
        fmt::format("dataset {} not found; run generate first", u_path));
  }
  const ScorePair scores = LoadScores(u_path, s_path);
  const int n = scores.items();
  EnsureDir(config.output_dir);
  const std::string out_path =
      (fs::path(config.output_dir) / "solutions.csv").string();

  std::vector<SolutionPoint> rows;
  std::set<std::string> done;
  if (fs::exists(out_path)) {
    rows = ReadSolutions(out_path);
    for (const auto& p : rows) {
      done.insert(RunKey(p) + "|" + std::to_string(p.seed));
    }
  }

  // Completed rows are appended immediately so an interrupted run keeps them.
  {
    std::string text = Header();
    for (const auto& p : rows) text += ToRow(p);
    WriteText(out_path, text);
  }
  std::ofstream appender(out_path, std::ios::binary | std::ios::app);
  if (!appender) throw IoError(fmt::format("cannot append to {}", out_path));

  int added = 0;
  const auto record = [&](const SolutionPoint& p) {
    appender << ToRow(p);
    appender.flush();
    rows.push_back(p);
    ++added;
  };
  const auto prepare =
      [&](SolutionPoint proto) -> std::optional<SolutionPoint> {
    proto.seed = DeriveSeed(config.seed, RunKey(proto));
    if (done.count(RunKey(proto) + "|" + std::to_string(proto.seed))) {
      return std::nullopt;
    }
    return proto;
  };

  for (int k : config.EffectiveKs(n)) {
    const MetricsRecord naive = Evaluate(scores, TopK(scores.utility, k));

    if (config.naive) {
      SolutionPoint proto;
      proto.method = "naive";
      proto.k = k;
      if (auto p = prepare(proto)) {
        SolutionPoint row = MakeSolutionPoint("naive", naive, naive);
        row.seed = p->seed;
        record(row);
      }
    }

    if (config.feir) {
      TrainConfig train = config.feir->train;
      train.k = k;
      bool lr_searched = false;
      for (const LossWeights& w : config.feir->grid) {
        SolutionPoint proto;
        proto.method = "feir";
        proto.weights = w;
        proto.k = k;
        auto p = prepare(proto);
        if (!p) continue;
        try {
          if (!config.feir->lr_candidates.empty() && !lr_searched) {
            TrainConfig probe = train;
            probe.weights = LossWeights{1.0, 1.0, 1.0, 0.0};
            train.learning_rate =
                SearchLearningRate(scores, probe, config.feir->lr_candidates,
                                   config.feir->lr_probe_steps);
            lr_searched = true;
            fmt::print(stderr, "k={}: learning rate {}\n", k,
                       train.learning_rate);
          }
          TrainConfig run = train;
          run.weights = w;
          run.seed = p->seed;
          const TrainTrace trace = Fit(scores, run);
          record(Evaluated(*p, scores, TopK(trace.policy.probs, k), naive));
        } catch (const Error& e) {
          record(FailedPoint(*p, e.what()));
        }
      }
    }

    if (config.shuffle) {
      std::vector<int> depths = config.shuffle->depths;
      if (depths.empty()) depths.push_back(DefaultShuffleDepth(k, n));
      for (int d : depths) {
        SolutionPoint proto;
        proto.method = "shuffle";
        proto.d = d;
        proto.k = k;
        auto p = prepare(proto);
        if (!p) continue;
        try {
          record(Evaluated(*p, scores, Shuffle(scores, k, d, p->seed), naive));
        } catch (const Error& e) {
          record(FailedPoint(*p, e.what()));
        }
      }
    }

    if (config.ca) {
      for (double scale : config.ca->epsilon_scales) {
        SolutionPoint proto;
        proto.method = "ca";
        proto.epsilon = scale / n;
        proto.k = k;
        auto p = prepare(proto);
        if (!p) continue;
        try {
          CAConfig cc{*p->epsilon, config.ca->max_iters,
                      config.ca->marginal_tol};
          const CAResult res = CongestionAlleviation(scores, k, cc);
          record(Evaluated(*p, scores, TopK(res.policy.probs, k), naive));
        } catch (const Error& e) {
          record(FailedPoint(*p, e.what()));
        }
      }
    }

    if (config.rr) {
      for (double tau : config.rr->taus) {
        SolutionPoint proto;
        proto.method = "rr";
        proto.tau = tau;
        proto.k = k;
        auto p = prepare(proto);
        if (!p) continue;
        try {
          const RRConfig rc{tau, p->seed, config.rr->exclusive};
          record(Evaluated(*p, scores, RoundRobin(scores, k, rc), naive));
        } catch (const Error& e) {
          record(FailedPoint(*p, e.what()));
        }
      }
    }
  }
  appender.close();

  SortSolutions(rows);
  WriteSolutions(out_path, rows);
  return added;
}

void CmdReport(const std::string& solutions_path, const ReportConfig& config,
               const std::string& output_dir) {
  const std::vector<std::string> required = {
      "method",           "k",         "utility_norm", "overall_norm",
      "inferiority_norm", "mean_rank", "mean_gap",     "status"};
  std::vector<SolutionPoint> all = ReadSolutions(solutions_path, required);
  SortSolutions(all);
  EnsureDir(output_dir);

  std::vector<int> ks;
  std::vector<std::string> methods;
  for (const auto& p : all) {
    if (std::find(ks.begin(), ks.end(), p.k) == ks.end()) ks.push_back(p.k);
    if (std::find(methods.begin(), methods.end(), p.method) == methods.end()) {
      methods.push_back(p.method);
    }
  }
  std::sort(methods.begin(), methods.end(),
            [](const std::string& a, const std::string& b) {
              return std::make_pair(MethodRank(a), a) <
                     std::make_pair(MethodRank(b), b);
            });

  struct Axis {
    const char* label;
    const char* metric;
    std::pair<double, double> ref;
    double threshold;
  };
  const Axis axes[] = {
      {"g", "overall_norm", config.fairness_ref, config.fairness_threshold},
      {"i", "inferiority_norm", config.fairness_ref, config.fairness_threshold},
      {"rank", "mean_rank", config.rank_ref, config.competition_threshold},
      {"gap", "mean_gap", config.gap_ref, config.competition_threshold}};

  std::string pareto =
      "k,x_metric,y_metric,x,y,method,weights,d,epsilon,tau,seed\n";
  std::string table = "k";
  for (const auto& a : axes) {
    for (const auto& m : methods) table += fmt::format(",hv_{}:{}", a.label, m);
  }
  for (const auto& a : axes) {
    for (const auto& m : methods) {
      table += fmt::format(",min_{}@{}:{}", a.label, a.threshold, m);
    }
  }
  table += "\n";

  for (int k : ks) {
    std::vector<std::string> hv_cells, min_cells;
    for (const auto& a : axes) {
      for (const auto& m : methods) {
        std::vector<SolutionPoint> pts;
        for (const auto& p : all) {
          if (p.k == k && p.method == m && p.status == "ok") pts.push_back(p);
        }
        std::optional<double> hv;
        if (!pts.empty()) {
          try {
            const Front2D front = ParetoFront(pts, a.metric, "utility_norm");
            hv = Hypervolume2D(front, a.ref);
            for (const auto& fp : front.points) {
              const SolutionPoint& s = pts[fp.source];
              std::string w;
              if (s.weights) {
                w = fmt::format("{};{};{};{}", s.weights->envy,
                                s.weights->inferiority, s.weights->utility,
                                s.weights->penalty);
              }
              pareto +=
                  fmt::format("{},{},utility_norm,{},{},{},{},{},{},{},{}\n", k,
                              a.metric, Num(fp.x), Num(fp.y), CsvField(m), w,
                              s.d ? std::to_string(*s.d) : "", Num(s.epsilon),
                              Num(s.tau), s.seed);
            }
          } catch (const ArgumentError&) {
            // no point defines both metrics
          }
        }
        const auto best =
            pts.empty() ? std::nullopt
                        : MinFairnessAboveThreshold(pts, a.metric, a.threshold);
        hv_cells.push_back(hv ? Num(*hv) : kAbsent);
        min_cells.push_back(best ? Num(*best) : kAbsent);
      }
    }
    table += std::to_string(k);
    for (const auto& c : hv_cells) table += "," + c;
    for (const auto& c : min_cells) table += "," + c;
    table += "\n";
  }

  WriteText((fs::path(output_dir) / "pareto.csv").string(), pareto);
  WriteText((fs::path(output_dir) / "hv_table.csv").string(), table);
}

}  // namespace feir
