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
#include "feir/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include <fmt/core.h>
#include <nlohmann/json.hpp>

namespace feir {

namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double ParseDouble(std::string_view token, int row, int col) {
  token = Trim(token);
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (token.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(fmt::format("row {}, column {}: cannot parse '{}'",
                                 row + 1, col + 1, token),
                     row, col);
  }
  return value;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename Derived, typename Fmt>
void WriteRows(const Eigen::MatrixBase<Derived>& m, const std::string& path,
               Fmt format) {
  if (m.size() == 0) throw ArgumentError("refusing to save an empty matrix");
  if (std::filesystem::is_directory(path)) {
    throw IoError(fmt::format("{} is a directory", path));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path));
  std::string line;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) line += ',';
      line += format(m(i, j));
    }
    line += '\n';
    out << line;
  }
  if (!out) throw IoError(fmt::format("write to {} failed", path));
}

}  // namespace

Matrix LoadMatrix(const std::string& path,
                  std::optional<std::pair<int, int>> expected_dims) {
  if (std::filesystem::is_directory(path)) {
    throw IoError(fmt::format("{} is a directory", path));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path));

  std::vector<double> values;
  std::size_t cols = 0;
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    std::size_t count = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(
          ParseDouble(rest.substr(0, comma), rows, static_cast<int>(count)));
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      cols = count;
    } else if (count != cols) {
      throw FormatError(
          fmt::format("{}: ragged rows, row 1 has {} values but row {} has {}",
                      path, cols, rows + 1, count));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError(fmt::format("{}: no data", path));

  Matrix m(rows, static_cast<Eigen::Index>(cols));
  for (int i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = values[i * cols + j];
  }
  if (expected_dims && (expected_dims->first != rows ||
                        expected_dims->second != static_cast<int>(cols))) {
    throw DimensionError(fmt::format("{}: expected {}x{}, found {}x{}", path,
                                     expected_dims->first,
                                     expected_dims->second, rows, cols));
  }
  return m;
}

Matrix LoadScoreMatrix(const std::string& path,
                       std::optional<std::pair<int, int>> expected_dims) {
  Matrix m = LoadMatrix(path, expected_dims);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!(m(i, j) > 0.0 && m(i, j) < 1.0)) {
        throw ArgumentError(
            fmt::format("{}: score at row {}, column {} is {}, outside (0, 1)",
                        path, i + 1, j + 1, m(i, j)));
      }
    }
  }
  return m;
}

void SaveMatrix(const Matrix& matrix, const std::string& path) {
  WriteRows(matrix, path, [](double v) { return FormatDouble(v); });
}

void SaveCountMatrix(const IntMatrix& counts, const std::string& path) {
  WriteRows(counts, path, [](int v) { return std::to_string(v); });
}

std::string SidecarPath(const std::string& matrix_path) {
  std::filesystem::path p(matrix_path);
  p.replace_extension(".meta.json");
  return p.string();
}

void SaveMeta(const MatrixMeta& meta, const std::string& matrix_path) {
  nlohmann::ordered_json j;
  j["m"] = meta.m;
  j["n"] = meta.n;
  j["k"] = meta.k ? nlohmann::ordered_json(*meta.k) : nlohmann::ordered_json();
  j["seed"] =
      meta.seed ? nlohmann::ordered_json(*meta.seed) : nlohmann::ordered_json();
  j["generator"] = meta.generator ? nlohmann::ordered_json(*meta.generator)
                                  : nlohmann::ordered_json();
  const std::string path = SidecarPath(matrix_path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path));
  out << j.dump(2) << '\n';
}

std::optional<MatrixMeta> LoadMeta(const std::string& matrix_path) {
  const std::string path = SidecarPath(matrix_path);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("{}: {}", path, e.what()));
  }
  MatrixMeta meta;
  try {
    meta.m = j.at("m").get<int>();
    meta.n = j.at("n").get<int>();
    if (j.contains("k") && !j["k"].is_null()) meta.k = j["k"].get<int>();
    if (j.contains("seed") && !j["seed"].is_null()) {
      meta.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("generator") && !j["generator"].is_null()) {
      meta.generator = j["generator"].get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(fmt::format("{}: {}", path, e.what()));
  }
  return meta;
}

ScorePair LoadScores(const std::string& utility_path,
                     const std::string& suitability_path) {
  std::optional<std::pair<int, int>> dims;
  if (auto meta = LoadMeta(utility_path)) dims = {{meta->m, meta->n}};
  Matrix u = LoadScoreMatrix(utility_path, dims);
  if (suitability_path.empty()) return ScorePair::Shared(std::move(u));
  Matrix s = LoadScoreMatrix(suitability_path,
                             std::pair<int, int>{static_cast<int>(u.rows()),
                                                 static_cast<int>(u.cols())});
  return ScorePair::Distinct(std::move(u), std::move(s));
}

Matrix RowSoftmax(const Matrix& logits) {
  if (!logits.allFinite()) throw NumericError("softmax input is not finite");
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double row_max = logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < logits.cols(); ++j) {
      out(i, j) = std::exp(logits(i, j) - row_max);
      sum += out(i, j);
    }
    out.row(i) /= sum;
  }
  return out;
}

CountMatrix TopK(const Matrix& scores, int k) {
  const int n = static_cast<int>(scores.cols());
  if (k < 1 || k > n) {
    throw ArgumentError(fmt::format("top-k with k = {} and n = {}", k, n));
  }
  CountMatrix c{IntMatrix::Zero(scores.rows(), n), k};
  std::vector<int> idx(n);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                      [&](int a, int b) {
                        const double va = scores(i, a), vb = scores(i, b);
                        return va > vb || (va == vb && a < b);
                      });
    for (int r = 0; r < k; ++r) c.counts(i, idx[r]) = 1;
  }
  return c;
}

CountMatrix SampleRecommendations(const Policy& policy, std::mt19937_64& rng) {
  const int m = policy.users(), n = policy.items();
  CountMatrix c{IntMatrix::Zero(m, n), policy.k};
  std::vector<double> cdf(n);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += policy.probs(i, j);
      cdf[j] = acc;
    }
    for (int t = 0; t < policy.k; ++t) {
      const double u = UniformUnit(rng) * acc;
      auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
      int j = static_cast<int>(it - cdf.begin());
      if (j >= n) {
        // Rounding pushed u past the last cdf value.
        j = n - 1;
        while (j > 0 && policy.probs(i, j) == 0.0) --j;
      }
      ++c.counts(i, j);
    }
  }
  return c;
}

CountMatrix SampleRecommendations(const Policy& policy, std::uint64_t seed) {
  policy.Validate();
  std::mt19937_64 rng(seed);
  return SampleRecommendations(policy, rng);
}

}  // namespace feir
