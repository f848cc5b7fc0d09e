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

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <limits>

#include "otcoreset/kernels.hpp"

namespace otcoreset::kernels::omp {

void DistanceRows(const Pool& train, const Pool& val, std::span<const Index> rows,
                  Metric metric, Matrix& out) {
  const auto n_rows = static_cast<std::int64_t>(rows.size());
  const std::size_t n_val = val.size();
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n_rows; ++k) {
    const auto a = train.embedding(static_cast<std::size_t>(rows[k]));
    auto dst = out.row(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < n_val; ++j) dst[j] = Distance(a, val.embedding(j), metric);
  }
}

void Gains(const PooCostMatrix& m, std::span<const double> col_mins,
           std::span<const char> in_set, bool empty_set, std::span<double> gains) {
  const auto n = static_cast<std::int64_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t z = 0; z < n; ++z)
    gains[z] = in_set[z] ? std::numeric_limits<double>::infinity()
                         : Gain(m.row(static_cast<std::size_t>(z)), col_mins, empty_set);
}

DualEnvelope BuildEnvelope(const PooCostMatrix& m, std::span<const Index> set,
                           std::span<const double> u) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  DualEnvelope env;
  env.best.assign(m.cols(), kInf);
  env.best_pos.assign(m.cols(), 0);
  env.second.assign(m.cols(), kInf);
  const auto n_cols = static_cast<std::int64_t>(m.cols());
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < n_cols; ++j) {
    double best = kInf, second = kInf;
    std::size_t best_pos = 0;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double x = m(static_cast<std::size_t>(set[k]), static_cast<std::size_t>(j)) - u[k];
      if (x < best) {
        second = best;
        best = x;
        best_pos = k;
      } else if (x < second) {
        second = x;
      }
    }
    env.best[j] = best;
    env.best_pos[j] = best_pos;
    env.second[j] = second;
  }
  return env;
}

void Estimates(const PooCostMatrix& m, const DualEnvelope& env,
               std::span<const Index> member_pos, std::size_t set_size,
               std::span<KnotEstimate> out) {
  const auto n = static_cast<std::int64_t>(m.rows());
  const std::size_t n_cols = m.cols();
#pragma omp parallel
  {
    std::vector<double> knots(n_cols);
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t z = 0; z < n; ++z) {
      const Index pos = member_pos[z];
      if (pos >= 0 && set_size < 2) {
        out[z] = {std::numeric_limits<double>::quiet_NaN(),
                  std::numeric_limits<double>::quiet_NaN()};
        continue;
      }
      const auto row = m.row(static_cast<std::size_t>(z));
      for (std::size_t j = 0; j < n_cols; ++j) {
        const double f = (pos >= 0 && env.best_pos[j] == static_cast<std::size_t>(pos))
                             ? env.second[j]
                             : env.best[j];
        knots[j] = row[j] - f;
      }
      out[z] = MaximizeKnotObjective(knots, set_size);
    }
  }
}

}  // namespace otcoreset::kernels::omp
