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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracle.hpp"

namespace feir {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("feir_core_" +
             std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string File(const std::string& name) const {
    return (path_ / name).string();
  }
  std::string Dir() const { return path_.string(); }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string Write(const TempDir& dir, const std::string& name,
                  const std::string& text) {
  const std::string path = dir.File(name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Matrix UtilityExample() {
  return (Matrix(2, 3) << 0.2, 0.6, 0.9, 0.1, 0.8, 0.7).finished();
}

TEST(LoadMatrixTest, ParsesTwoByThree) {
  TempDir dir;
  const Matrix m = LoadMatrix(Write(dir, "u.csv", "0.2,0.6,0.9\n0.1,0.8,0.7"));
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 3);
  EXPECT_EQ(m, UtilityExample());
}

TEST(LoadMatrixTest, EmptyFileIsFormatError) {
  TempDir dir;
  EXPECT_THROW(LoadMatrix(Write(dir, "e.csv", "")), FormatError);
}

TEST(LoadMatrixTest, RaggedRowsAreFormatError) {
  TempDir dir;
  EXPECT_THROW(LoadMatrix(Write(dir, "r.csv", "0.1,0.2,0.3\n0.4,0.5\n")),
               FormatError);
}

TEST(LoadMatrixTest, NonNumericTokenReportsLocation) {
  TempDir dir;
  try {
    LoadMatrix(Write(dir, "p.csv", "0.1,0.2\n0.3,abc\n"));
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 1);
    EXPECT_EQ(e.column(), 1);
    EXPECT_NE(std::string(e.what()).find("row 2, column 2"), std::string::npos);
  }
}

TEST(LoadMatrixTest, DimensionMismatch) {
  TempDir dir;
  const std::string path = Write(dir, "d.csv", "0.1,0.2\n0.3,0.4\n");
  EXPECT_THROW(LoadMatrix(path, std::make_pair(3, 2)), DimensionError);
  EXPECT_NO_THROW(LoadMatrix(path, std::make_pair(2, 2)));
}

TEST(LoadMatrixTest, MissingFileIsIoError) {
  TempDir dir;
  EXPECT_THROW(LoadMatrix(dir.File("nope.csv")), IoError);
}

TEST(LoadScoreMatrixTest, RejectsOutOfRangeEntries) {
  TempDir dir;
  EXPECT_THROW(LoadScoreMatrix(Write(dir, "a.csv", "0.5,1.0\n")),
               ArgumentError);
  EXPECT_THROW(LoadScoreMatrix(Write(dir, "b.csv", "0.0,0.5\n")),
               ArgumentError);
  EXPECT_NO_THROW(LoadScoreMatrix(Write(dir, "c.csv", "0.5,0.999\n")));
}

TEST(SaveMatrixTest, RoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(1);
  const Matrix m = oracle::RandomUnit(2, 3, rng);
  SaveMatrix(m, dir.File("m.csv"));
  const Matrix back = LoadMatrix(dir.File("m.csv"));
  EXPECT_LE((back - m).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SaveMatrixTest, SingleEntryFileContents) {
  TempDir dir;
  SaveMatrix(Matrix::Constant(1, 1, 0.5), dir.File("one.csv"));
  std::string text = ReadAll(dir.File("one.csv"));
  while (!text.empty() && text.back() == '\n') text.pop_back();
  EXPECT_EQ(text, "0.5");
}

TEST(SaveMatrixTest, DirectoryPathIsIoError) {
  TempDir dir;
  EXPECT_THROW(SaveMatrix(UtilityExample(), dir.Dir()), IoError);
}

TEST(SidecarTest, MetaRoundTrip) {
  TempDir dir;
  const std::string path = dir.File("u.csv");
  SaveMatrix(UtilityExample(), path);
  EXPECT_FALSE(LoadMeta(path).has_value());
  SaveMeta({2, 3, 5, 42, "user_groups"}, path);
  EXPECT_EQ(SidecarPath(path), dir.File("u.meta.json"));
  const auto meta = LoadMeta(path);
  ASSERT_TRUE(meta.has_value());
  EXPECT_EQ(meta->m, 2);
  EXPECT_EQ(meta->n, 3);
  EXPECT_EQ(meta->k, 5);
  EXPECT_EQ(meta->seed, 42u);
  EXPECT_EQ(meta->generator, "user_groups");
}

TEST(SidecarTest, NullFieldsStayEmpty) {
  TempDir dir;
  const std::string path = dir.File("v.csv");
  SaveMeta({4, 5, std::nullopt, std::nullopt, std::nullopt}, path);
  const auto meta = LoadMeta(path);
  ASSERT_TRUE(meta.has_value());
  EXPECT_FALSE(meta->k.has_value());
  EXPECT_FALSE(meta->seed.has_value());
  EXPECT_FALSE(meta->generator.has_value());
}

TEST(RowSoftmaxTest, ZeroRowIsUniform) {
  const Matrix p = RowSoftmax(Matrix::Zero(1, 3));
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(p(0, j), 1.0 / 3.0, 1e-15);
}

TEST(RowSoftmaxTest, LogWeightsGiveProportions) {
  Matrix z(1, 3);
  z << 0.0, std::log(2.0), std::log(3.0);
  const Matrix p = RowSoftmax(z);
  EXPECT_NEAR(p(0, 0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(p(0, 1), 2.0 / 6.0, 1e-15);
  EXPECT_NEAR(p(0, 2), 3.0 / 6.0, 1e-15);
}

TEST(RowSoftmaxTest, LargeGapSaturates) {
  Matrix z(1, 4);
  z << 20.0, 0.0, 0.0, 0.0;
  EXPECT_GT(RowSoftmax(z)(0, 0), 0.999999);
}

TEST(RowSoftmaxTest, NonFiniteIsNumericError) {
  Matrix z = Matrix::Zero(2, 2);
  z(1, 0) = std::nan("");
  EXPECT_THROW(RowSoftmax(z), NumericError);
  z(1, 0) = INFINITY;
  EXPECT_THROW(RowSoftmax(z), NumericError);
}

TEST(RowSoftmaxTest, ShiftInvariantAndStochastic) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd(0.0, 5.0);
  for (int t = 0; t < 20; ++t) {
    Matrix z(4, 7);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 7; ++j) z(i, j) = nd(rng);
    }
    Matrix shifted = z;
    for (int i = 0; i < 4; ++i) shifted.row(i).array() += nd(rng) * 100.0;
    const Matrix p = RowSoftmax(z), q = RowSoftmax(shifted);
    EXPECT_LE((p - q).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-12);
    // Softmax keeps the ranking.
    EXPECT_EQ(TopK(p, 3).counts, TopK(z, 3).counts);
  }
}

TEST(TopKTest, Examples) {
  Matrix a(1, 3);
  a << 0.2, 0.6, 0.9;
  EXPECT_EQ(TopK(a, 1).counts, (IntMatrix(1, 3) << 0, 0, 1).finished());
  Matrix b(1, 3);
  b << 0.5, 0.5, 0.1;
  EXPECT_EQ(TopK(b, 1).counts, (IntMatrix(1, 3) << 1, 0, 0).finished());
  Matrix c(1, 3);
  c << 0.1, 0.9, 0.8;
  EXPECT_EQ(TopK(c, 2).counts, (IntMatrix(1, 3) << 0, 1, 1).finished());
}

TEST(TopKTest, KOutOfRange) {
  EXPECT_THROW(TopK(UtilityExample(), 4), ArgumentError);
  EXPECT_THROW(TopK(UtilityExample(), 0), ArgumentError);
}

TEST(TopKTest, MatchesSortOracleWithTies) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> level(0, 4);
  for (int t = 0; t < 50; ++t) {
    Matrix x(5, 9);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 9; ++j) x(i, j) = level(rng) / 4.0;
    }
    const int k = 1 + t % 9;
    const CountMatrix c = TopK(x, k);
    EXPECT_EQ(oracle::ToGrid(c), oracle::TopK(oracle::ToGrid(x), k));
    EXPECT_EQ(c.k, k);
    EXPECT_NO_THROW(c.Validate());
    for (int i = 0; i < 5; ++i) EXPECT_EQ(c.counts.row(i).sum(), k);
  }
}

TEST(SampleRecommendationsTest, DegenerateRow) {
  Policy p{(Matrix(1, 3) << 1.0, 0.0, 0.0).finished(), 3};
  EXPECT_EQ(SampleRecommendations(p, 5).counts,
            (IntMatrix(1, 3) << 3, 0, 0).finished());
}

TEST(SampleRecommendationsTest, UniformFrequencies) {
  Policy p{Matrix::Constant(1, 4, 0.25), 1};
  std::vector<int> hits(4, 0);
  constexpr int kSeeds = 100000;
  for (int s = 0; s < kSeeds; ++s) {
    const CountMatrix c =
        SampleRecommendations(p, static_cast<std::uint64_t>(s));
    for (int j = 0; j < 4; ++j) hits[j] += c.counts(0, j);
  }
  for (int j = 0; j < 4; ++j) {
    EXPECT_NEAR(hits[j] / double(kSeeds), 0.25, 0.01);
  }
}

TEST(SampleRecommendationsTest, DeterministicAndRowSums) {
  std::mt19937_64 rng(5);
  Policy p{oracle::RandomStochastic(6, 5, rng), 4};
  const CountMatrix a = SampleRecommendations(p, 99);
  const CountMatrix b = SampleRecommendations(p, 99);
  EXPECT_EQ(a.counts, b.counts);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(a.counts.row(i).sum(), 4);
  EXPECT_GE(a.counts.minCoeff(), 0);
}

TEST(SampleRecommendationsTest, ZeroProbabilityItemsNeverDrawn) {
  Policy p{(Matrix(2, 4) << 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 1.0).finished(),
           4};
  for (std::uint64_t s = 0; s < 200; ++s) {
    const CountMatrix c = SampleRecommendations(p, s);
    EXPECT_EQ(c.counts(0, 0), 0);
    EXPECT_EQ(c.counts(0, 3), 0);
    EXPECT_EQ(c.counts(1, 3), 4);
  }
}

TEST(TypesTest, ScorePairValidation) {
  EXPECT_NO_THROW(ScorePair::Shared(UtilityExample()).Validate());
  Matrix bad = UtilityExample();
  bad(0, 0) = 1.0;
  EXPECT_THROW(ScorePair::Shared(bad).Validate(), ArgumentError);
  EXPECT_THROW(
      ScorePair::Distinct(UtilityExample(), Matrix::Constant(3, 2, 0.5))
          .Validate(),
      DimensionError);
  ScorePair inconsistent = ScorePair::Shared(UtilityExample());
  inconsistent.suitability(1, 1) = 0.3;
  EXPECT_THROW(inconsistent.Validate(), ArgumentError);
}

TEST(TypesTest, PolicyValidation) {
  EXPECT_NO_THROW((Policy{Matrix::Constant(2, 4, 0.25), 2}.Validate()));
  EXPECT_THROW((Policy{Matrix::Constant(2, 4, 0.3), 2}.Validate()),
               ArgumentError);
  EXPECT_THROW((Policy{Matrix::Constant(2, 4, 0.25), 5}.Validate()),
               ArgumentError);
}

TEST(TypesTest, CountMatrixValidation) {
  CountMatrix c{(IntMatrix(2, 3) << 1, 1, 0, 2, 0, 0).finished(), 2};
  EXPECT_NO_THROW(c.Validate());
  EXPECT_FALSE(c.IsBinary());
  c.counts(1, 1) = 1;
  EXPECT_THROW(c.Validate(), ArgumentError);
}

}  // namespace
}  // namespace feir
