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

#ifndef OTCORESET_KERNELS_HPP_
#define OTCORESET_KERNELS_HPP_

// Data-parallel inner loops. Each kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp; both produce
// bit-identical output because every output element is computed by one
// thread with a fixed summation order.

#include <span>
#include <vector>

#include "otcoreset/common.hpp"
#include "otcoreset/cost_matrix.hpp"
#include "otcoreset/pool_io.hpp"

namespace otcoreset::kernels {

// Column-wise minimum of (M(i, j) - u_i) over a set S, plus the runner-up, so
// that the minimum over S \ {z} is available in O(1) for every z in S.
struct DualEnvelope {
  std::vector<double> best;
  std::vector<std::size_t> best_pos;  // position in S of the minimizer
  std::vector<double> second;         // +inf when |S| == 1
};

struct KnotEstimate {
  double value = 0.0;
  double y_hat = 0.0;
};

// Number of knots R such that the R-th smallest knot maximizes the
// piecewise-linear estimator: R = ceil(val_size / set_size).
std::size_t KnotRank(std::size_t val_size, std::size_t set_size);

// F(y) = y / set_size + (1 / |knots|) * sum_j min(knots_j - y, 0).
double KnotObjective(std::span<const double> knots, double y,
                     std::size_t set_size);

// Maximizes KnotObjective over y. `knots` is used as scratch and reordered.
KnotEstimate MaximizeKnotObjective(std::span<double> knots,
                                   std::size_t set_size);

// Sum over columns of min(row_j - col_mins_j, 0); with an empty set the
// column minima are +inf and the plain row sum is returned instead.
double Gain(std::span<const double> row, std::span<const double> col_mins,
            bool empty_set);

namespace serial {

void DistanceRows(const Pool& train, const Pool& val,
                  std::span<const Index> rows, Metric metric, Matrix& out);

// gains[z] for every z with !in_set[z]; +inf for members.
void Gains(const PooCostMatrix& m, std::span<const double> col_mins,
           std::span<const char> in_set, bool empty_set,
           std::span<double> gains);

DualEnvelope BuildEnvelope(const PooCostMatrix& m, std::span<const Index> set,
                           std::span<const double> u);

// Estimates for every training index. member_pos[z] is z's position in S or
// -1 when z is not a member.
void Estimates(const PooCostMatrix& m, const DualEnvelope& env,
               std::span<const Index> member_pos, std::size_t set_size,
               std::span<KnotEstimate> out);

}  // namespace serial

namespace omp {

void DistanceRows(const Pool& train, const Pool& val,
                  std::span<const Index> rows, Metric metric, Matrix& out);
void Gains(const PooCostMatrix& m, std::span<const double> col_mins,
           std::span<const char> in_set, bool empty_set,
           std::span<double> gains);
DualEnvelope BuildEnvelope(const PooCostMatrix& m, std::span<const Index> set,
                           std::span<const double> u);
void Estimates(const PooCostMatrix& m, const DualEnvelope& env,
               std::span<const Index> member_pos, std::size_t set_size,
               std::span<KnotEstimate> out);

}  // namespace omp

// Index of the smallest value; ties go to the lowest index. Returns
// values.size() when every value is +inf or the span is empty.
std::size_t ArgMin(std::span<const double> values);

}  // namespace otcoreset::kernels

#endif  // OTCORESET_KERNELS_HPP_
