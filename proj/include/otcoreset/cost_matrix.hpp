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

#ifndef OTCORESET_COST_MATRIX_HPP_
#define OTCORESET_COST_MATRIX_HPP_

#include <functional>
#include <span>
#include <vector>

#include "otcoreset/common.hpp"
#include "otcoreset/pool_io.hpp"

namespace otcoreset {

enum class Metric { kEuclidean, kManhattan };

// Pairwise distances, rows = training points, columns = validation points.
struct DistanceMatrix {
  Matrix entries;
  Metric metric = Metric::kEuclidean;
};

// M(i, j) = D(i, j) - lambda * g(i).
struct PooCostMatrix {
  Matrix entries;
  double lambda = 0.0;
  std::vector<double> grad_norms;

  std::size_t rows() const { return entries.rows(); }
  std::size_t cols() const { return entries.cols(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
  std::span<const double> row(std::size_t i) const { return entries.row(i); }
};

double Distance(std::span<const float> a, std::span<const float> b,
                Metric metric);

DistanceMatrix ComputeDistances(const Pool& train, const Pool& val,
                                Metric metric = Metric::kEuclidean);

// Computes distance rows [first, first + tile_rows) at a time and hands each
// tile (row offset, tile matrix) to `sink`. Bounded memory for pools whose
// dense matrix does not fit.
void ForEachDistanceTile(
    const Pool& train, const Pool& val, std::size_t tile_rows, Metric metric,
    const std::function<void(std::size_t, const Matrix&)>& sink);

// Distance rows for an arbitrary list of training indices.
Matrix ComputeDistanceRows(const Pool& train, const Pool& val,
                           std::span<const Index> rows,
                           Metric metric = Metric::kEuclidean);

PooCostMatrix BuildPooMatrix(const DistanceMatrix& d, std::vector<double> g,
                             double lambda);

// Affine map of g onto [0, 1]; a constant vector maps to all zeros.
std::vector<double> MinMaxNormalize(std::span<const double> g);

}  // namespace otcoreset

#endif  // OTCORESET_COST_MATRIX_HPP_
