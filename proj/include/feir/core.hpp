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
#include <random>
#include <string>
#include <utility>

#include "feir/types.hpp"

namespace feir {

// Optional JSON sidecar stored next to a matrix file as "<stem>.meta.json".
struct MatrixMeta {
  int m = 0;
  int n = 0;
  std::optional<int> k;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> generator;
};

// Reads a headerless CSV of decimals. Dimensions are inferred from the file
// and checked against `expected_dims` (rows, cols) when given.
Matrix LoadMatrix(const std::string& path,
                  std::optional<std::pair<int, int>> expected_dims = {});

// Same as LoadMatrix, additionally rejecting entries outside (0, 1).
Matrix LoadScoreMatrix(const std::string& path,
                       std::optional<std::pair<int, int>> expected_dims = {});

// Writes the shortest decimal representation of each entry that reads back
// to the same double.
void SaveMatrix(const Matrix& matrix, const std::string& path);
void SaveCountMatrix(const IntMatrix& counts, const std::string& path);

std::string SidecarPath(const std::string& matrix_path);
void SaveMeta(const MatrixMeta& meta, const std::string& matrix_path);
std::optional<MatrixMeta> LoadMeta(const std::string& matrix_path);

// Loads U (and S when `suitability_path` is non-empty) as a ScorePair.
ScorePair LoadScores(const std::string& utility_path,
                     const std::string& suitability_path = "");

// Row-wise softmax with row-max subtraction.
Matrix RowSoftmax(const Matrix& logits);

// Binary count matrix with ones at the k largest entries of each row. Ties
// go to the lowest column index.
CountMatrix TopK(const Matrix& scores, int k);

// Independent multinomial draws with k trials per user.
CountMatrix SampleRecommendations(const Policy& policy, std::mt19937_64& rng);
CountMatrix SampleRecommendations(const Policy& policy, std::uint64_t seed);

// Uniform double in [0, 1) using the top 53 bits of one engine output.
inline double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace feir
