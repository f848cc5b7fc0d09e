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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "otcoreset/kernels.hpp"

namespace otcoreset {

double Distance(std::span<const float> a, std::span<const float> b, Metric metric) {
  double acc = 0.0;
  switch (metric) {
    case Metric::kEuclidean:
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = static_cast<double>(a[k]) - static_cast<double>(b[k]);
        acc += d * d;
      }
      return std::sqrt(acc);
    case Metric::kManhattan:
      for (std::size_t k = 0; k < a.size(); ++k)
        acc += std::abs(static_cast<double>(a[k]) - static_cast<double>(b[k]));
      return acc;
  }
  return acc;
}

namespace {

void CheckDims(const Pool& train, const Pool& val) {
  if (train.dim() != val.dim()) {
    std::ostringstream os;
    os << "training embeddings have dimension " << train.dim()
       << " but validation embeddings have dimension " << val.dim();
    throw InputError(os.str());
  }
}

}  // namespace

Matrix ComputeDistanceRows(const Pool& train, const Pool& val,
                           std::span<const Index> rows, Metric metric) {
  CheckDims(train, val);
  for (Index r : rows)
    if (r < 0 || static_cast<std::size_t>(r) >= train.size())
      throw InputError("distance row " + std::to_string(r) + " out of range");
  Matrix out(rows.size(), val.size());
  kernels::omp::DistanceRows(train, val, rows, metric, out);
  return out;
}

void ForEachDistanceTile(const Pool& train, const Pool& val, std::size_t tile_rows,
                         Metric metric,
                         const std::function<void(std::size_t, const Matrix&)>& sink) {
  CheckDims(train, val);
  if (tile_rows == 0) throw InputError("tile size must be positive");
  IndexList rows;
  for (std::size_t first = 0; first < train.size(); first += tile_rows) {
    const std::size_t last = std::min(train.size(), first + tile_rows);
    rows.resize(last - first);
    std::iota(rows.begin(), rows.end(), static_cast<Index>(first));
    Matrix tile(rows.size(), val.size());
    kernels::omp::DistanceRows(train, val, rows, metric, tile);
    sink(first, tile);
  }
}

DistanceMatrix ComputeDistances(const Pool& train, const Pool& val, Metric metric) {
  CheckDims(train, val);
  DistanceMatrix d;
  d.metric = metric;
  d.entries = Matrix(train.size(), val.size());
  constexpr std::size_t kTile = 1024;
  ForEachDistanceTile(train, val, kTile, metric, [&](std::size_t first, const Matrix& tile) {
    std::copy(tile.data().begin(), tile.data().end(),
              d.entries.data().begin() + static_cast<std::ptrdiff_t>(first * val.size()));
  });
  return d;
}

PooCostMatrix BuildPooMatrix(const DistanceMatrix& d, std::vector<double> g, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    std::ostringstream os;
    os << "lambda must be a finite value >= 0, got " << lambda;
    throw InputError(os.str());
  }
  if (g.size() != d.entries.rows()) {
    std::ostringstream os;
    os << "gradient-norm vector has length " << g.size() << " but the distance matrix has "
       << d.entries.rows() << " rows";
    throw InputError(os.str());
  }
  PooCostMatrix m;
  m.entries = d.entries;
  m.lambda = lambda;
  for (std::size_t i = 0; i < m.entries.rows(); ++i) {
    const double shift = lambda * g[i];
    for (double& x : m.entries.row(i)) x -= shift;
  }
  m.grad_norms = std::move(g);
  return m;
}

std::vector<double> MinMaxNormalize(std::span<const double> g) {
  std::vector<double> out(g.size(), 0.0);
  if (g.empty()) return out;
  const auto [lo, hi] = std::minmax_element(g.begin(), g.end());
  const double range = *hi - *lo;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = (g[i] - *lo) / range;
  return out;
}

}  // namespace otcoreset
