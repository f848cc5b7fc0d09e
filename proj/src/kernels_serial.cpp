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

#include <algorithm>
#include <cmath>
#include <limits>

#include "otcoreset/kernels.hpp"

namespace otcoreset::kernels {

std::size_t KnotRank(std::size_t val_size, std::size_t set_size) {
  return (val_size + set_size - 1) / set_size;
}

double KnotObjective(std::span<const double> knots, double y, std::size_t set_size) {
  double below = 0.0;
  for (double k : knots) below += std::min(k - y, 0.0);
  return y / static_cast<double>(set_size) + below / static_cast<double>(knots.size());
}

// F is concave and piecewise linear with slope 1/|S| - #{knots < y}/|V|; the
// slope is positive up to the R-th smallest knot and nonpositive after it.
KnotEstimate MaximizeKnotObjective(std::span<double> knots, std::size_t set_size) {
  const std::size_t rank = std::min(KnotRank(knots.size(), set_size), knots.size());
  auto nth = knots.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(knots.begin(), nth, knots.end());
  KnotEstimate e;
  e.y_hat = *nth;
  e.value = KnotObjective(knots, e.y_hat, set_size);
  return e;
}

double Gain(std::span<const double> row, std::span<const double> col_mins, bool empty_set) {
  double acc = 0.0;
  if (empty_set) {
    for (double x : row) acc += x;
    return acc;
  }
  for (std::size_t j = 0; j < row.size(); ++j) acc += std::min(row[j] - col_mins[j], 0.0);
  return acc;
}

std::size_t ArgMin(std::span<const double> values) {
  std::size_t best = values.size();
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] < best_value) {
      best_value = values[i];
      best = i;
    }
  return best;
}

namespace serial {

void DistanceRows(const Pool& train, const Pool& val, std::span<const Index> rows,
                  Metric metric, Matrix& out) {
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto a = train.embedding(static_cast<std::size_t>(rows[k]));
    for (std::size_t j = 0; j < val.size(); ++j)
      out(k, j) = Distance(a, val.embedding(j), metric);
  }
}

void Gains(const PooCostMatrix& m, std::span<const double> col_mins,
           std::span<const char> in_set, bool empty_set, std::span<double> gains) {
  for (std::size_t z = 0; z < m.rows(); ++z)
    gains[z] = in_set[z] ? std::numeric_limits<double>::infinity()
                         : Gain(m.row(z), col_mins, empty_set);
}

DualEnvelope BuildEnvelope(const PooCostMatrix& m, std::span<const Index> set,
                           std::span<const double> u) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  DualEnvelope env;
  env.best.assign(m.cols(), kInf);
  env.best_pos.assign(m.cols(), 0);
  env.second.assign(m.cols(), kInf);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double x = m(static_cast<std::size_t>(set[k]), j) - u[k];
      if (x < env.best[j]) {
        env.second[j] = env.best[j];
        env.best[j] = x;
        env.best_pos[j] = k;
      } else if (x < env.second[j]) {
        env.second[j] = x;
      }
    }
  }
  return env;
}

void Estimates(const PooCostMatrix& m, const DualEnvelope& env,
               std::span<const Index> member_pos, std::size_t set_size,
               std::span<KnotEstimate> out) {
  std::vector<double> knots(m.cols());
  for (std::size_t z = 0; z < m.rows(); ++z) {
    const Index pos = member_pos[z];
    if (pos >= 0 && set_size < 2) {
      out[z] = {std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
      continue;
    }
    const auto row = m.row(z);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double f = (pos >= 0 && env.best_pos[j] == static_cast<std::size_t>(pos))
                           ? env.second[j]
                           : env.best[j];
      knots[j] = row[j] - f;
    }
    out[z] = MaximizeKnotObjective(knots, set_size);
  }
}

}  // namespace serial
}  // namespace otcoreset::kernels
