// Copyright 2026 The otcoreset Authors
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

#include "otcoreset/cost_matrix.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.hpp"

namespace otcoreset {
namespace {

Pool Points(std::vector<float> xy) { return Pool(PoolRole::kTraining, 2, std::move(xy)); }

TEST(ComputeDistancesTest, PythagoreanTriple) {
  const DistanceMatrix d = ComputeDistances(Points({0, 0}), Points({3, 4}));
  EXPECT_EQ(d.entries, Matrix::FromRows({{5.0}}));
}

TEST(ComputeDistancesTest, HandComputedGrid) {
  const DistanceMatrix d = ComputeDistances(Points({0, 0, 1, 0}), Points({0, 0, 0, 2}));
  EXPECT_EQ(d.entries(0, 0), 0.0);
  EXPECT_EQ(d.entries(0, 1), 2.0);
  EXPECT_EQ(d.entries(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(d.entries(1, 1), std::sqrt(5.0));
}

TEST(ComputeDistancesTest, ManhattanMetric) {
  const DistanceMatrix d =
      ComputeDistances(Points({0, 0}), Points({3, -4}), Metric::kManhattan);
  EXPECT_EQ(d.entries(0, 0), 7.0);
}

TEST(ComputeDistancesTest, SwappingRolesTransposes) {
  std::mt19937_64 rng(51);
  std::normal_distribution<float> nd;
  std::vector<float> a(2 * 9), b(2 * 4);
  for (float& x : a) x = nd(rng);
  for (float& x : b) x = nd(rng);
  const DistanceMatrix ab = ComputeDistances(Points(a), Points(b));
  const DistanceMatrix ba = ComputeDistances(Points(b), Points(a));
  for (std::size_t i = 0; i < 9; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_EQ(ab.entries(i, j), ba.entries(j, i));
      EXPECT_GE(ab.entries(i, j), 0.0);
    }
}

TEST(ComputeDistancesTest, TilesCoverEveryRow) {
  std::mt19937_64 rng(52);
  std::normal_distribution<float> nd;
  std::vector<float> a(2 * 23), b(2 * 5);
  for (float& x : a) x = nd(rng);
  for (float& x : b) x = nd(rng);
  const Pool t = Points(a), v = Points(b);
  const DistanceMatrix full = ComputeDistances(t, v);
  Matrix stitched(23, 5);
  ForEachDistanceTile(t, v, 4, Metric::kEuclidean, [&](std::size_t first, const Matrix& tile) {
    for (std::size_t r = 0; r < tile.rows(); ++r)
      for (std::size_t j = 0; j < 5; ++j) stitched(first + r, j) = tile(r, j);
  });
  EXPECT_EQ(stitched, full.entries);
  const Matrix some = ComputeDistanceRows(t, v, IndexList{22, 0});
  EXPECT_TRUE(std::ranges::equal(some.row(0), full.entries.row(22)));
}

TEST(ComputeDistancesTest, RejectsDimensionMismatch) {
  const Pool one(PoolRole::kValidation, 1, {1.0f});
  EXPECT_THROW(ComputeDistances(Points({0, 0}), one), InputError);
}

TEST(BuildPooMatrixTest, DirectSubstitution) {
  DistanceMatrix d;
  d.entries = Matrix::FromRows({{1, 2}, {3, 4}});
  const PooCostMatrix m = BuildPooMatrix(d, {1, 2}, 0.5);
  EXPECT_EQ(m.entries, Matrix::FromRows({{0.5, 1.5}, {2, 3}}));
  EXPECT_EQ(BuildPooMatrix(d, {1, 2}, 0.0).entries, d.entries);
}

TEST(BuildPooMatrixTest, RejectsBadArguments) {
  DistanceMatrix d;
  d.entries = Matrix::FromRows({{1, 2}, {3, 4}});
  EXPECT_THROW(BuildPooMatrix(d, {1, 2}, -0.1), InputError);
  EXPECT_THROW(BuildPooMatrix(d, {1, 2}, NAN), InputError);
  EXPECT_THROW(BuildPooMatrix(d, {1}, 0.1), InputError);
}

TEST(BuildPooMatrixTest, RowShiftStructure) {
  std::mt19937_64 rng(53);
  DistanceMatrix d;
  d.entries = testing::RandomMatrix(rng, 12, 7, 0, 10);
  std::vector<double> g(12);
  std::uniform_real_distribution<double> ud(0, 3);
  for (double& x : g) x = ud(rng);
  for (double lambda : {0.0, 0.05, 0.1, 0.3, 0.5}) {
    const PooCostMatrix m = BuildPooMatrix(d, g, lambda);
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 7; ++j) {
        EXPECT_EQ(m(i, j), d.entries(i, j) - lambda * g[i]);
        EXPECT_NEAR(m(i, j) - m(i, 0), d.entries(i, j) - d.entries(i, 0), 1e-12);
      }
  }
}

TEST(MinMaxNormalizeTest, MapsToUnitIntervalKeepingOrder) {
  const std::vector<double> g{3, 1, 5, 1};
  EXPECT_EQ(MinMaxNormalize(g), (std::vector<double>{0.5, 0, 1, 0}));
  EXPECT_EQ(MinMaxNormalize(std::vector<double>{2, 2}), (std::vector<double>{0, 0}));
}

TEST(MinMaxNormalizeTest, RowOrderingUnchanged) {
  std::mt19937_64 rng(54);
  DistanceMatrix d;
  d.entries = testing::RandomMatrix(rng, 8, 6, 0, 10);
  std::vector<double> g(8);
  std::uniform_real_distribution<double> ud(0, 30);
  for (double& x : g) x = ud(rng);
  const PooCostMatrix a = BuildPooMatrix(d, g, 0.3);
  const PooCostMatrix b = BuildPooMatrix(d, MinMaxNormalize(g), 0.3);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      for (std::size_t k = 0; k < 6; ++k)
        EXPECT_EQ(a(i, j) < a(i, k), b(i, j) < b(i, k));
}

}  // namespace
}  // namespace otcoreset
