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

#ifndef OTCORESET_OT_SOLVER_HPP_
#define OTCORESET_OT_SOLVER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "otcoreset/common.hpp"
#include "otcoreset/cost_matrix.hpp"

namespace otcoreset {

// Row and column probability masses. When built from integer counts the
// solver runs on exact integer flows (mass = count / total), which is the path
// every uniform-marginal solve takes.
class Marginals {
 public:
  // p, q must be nonnegative with sums within 1e-12 of 1; they are then
  // renormalized exactly. Throws InputError otherwise.
  static Marginals FromMasses(std::vector<double> p, std::vector<double> q);
  static Marginals FromCounts(std::vector<std::int64_t> row_counts,
                              std::vector<std::int64_t> col_counts);
  static Marginals Uniform(std::size_t rows, std::size_t cols);

  std::span<const double> p() const { return p_; }
  std::span<const double> q() const { return q_; }
  bool integral() const { return row_counts_.has_value(); }
  std::span<const std::int64_t> row_counts() const { return *row_counts_; }
  std::span<const std::int64_t> col_counts() const { return *col_counts_; }

 private:
  std::vector<double> p_, q_;
  std::optional<std::vector<std::int64_t>> row_counts_, col_counts_;
};

struct PlanEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double mass = 0.0;
  friend bool operator==(const PlanEntry&, const PlanEntry&) = default;
};

// The dual gauge applied to (u, v): u is shifted so that it sums to zero over
// the rows with positive mass, v absorbs the opposite shift, and zero-mass
// rows get the tightest feasible value min_j (C_ij - v_j).
inline constexpr const char* kGaugeZeroSumSupport = "zero-sum-u-over-support";

struct TransportSolution {
  double objective = 0.0;
  std::vector<PlanEntry> plan;  // sorted by (row, col), positive masses only
  std::vector<double> dual_u;
  std::vector<double> dual_v;
  std::string normalization = kGaugeZeroSumSupport;
  std::size_t pivots = 0;
};

struct SolverOptions {
  // Check feasibility and strong duality after every solve and throw
  // InvariantError on failure.
  bool verify = true;
};

// Exact transportation LP by the primal network simplex method on a strongly
// feasible spanning tree (no cycling), block-search pricing, lowest-index
// tie-breaking. Costs may be negative.
TransportSolution SolveOt(const Matrix& cost, const Marginals& marginals,
                          const SolverOptions& options = {});

// OT between the uniform distribution on rows `set` of `m` and the uniform
// distribution on its columns, computed on the |set| x |V| submatrix. Duals
// are indexed by position in `set`.
TransportSolution SolveOtOnSubset(const Matrix& m, std::span<const Index> set,
                                  const SolverOptions& options = {});
TransportSolution SolveOtOnSubset(const PooCostMatrix& m,
                                  std::span<const Index> set,
                                  const SolverOptions& options = {});

struct CertificateReport {
  double max_row_violation = 0.0;
  double max_col_violation = 0.0;
  double min_plan_mass = 0.0;
  double max_dual_violation = 0.0;  // max(u_i + v_j - C_ij, 0)
  double duality_gap = 0.0;         // |objective - (p.u + q.v)|
  std::size_t support = 0;
  bool ok = false;
};

// Feasibility 1e-9 absolute, duality gap 1e-9 * (1 + |objective|), support at
// most rows + cols - 1.
CertificateReport CheckCertificate(const Matrix& cost,
                                   const Marginals& marginals,
                                   const TransportSolution& solution);

// OT value minus |mean_S f - mean_V f|; nonnegative for 1-Lipschitz f when the
// OT cost is the metric.
double KrGap(double ot_value, std::span<const double> f_subset,
             std::span<const double> f_val);

}  // namespace otcoreset

#endif  // OTCORESET_OT_SOLVER_HPP_
