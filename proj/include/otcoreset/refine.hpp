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

#ifndef OTCORESET_REFINE_HPP_
#define OTCORESET_REFINE_HPP_

#include <span>
#include <vector>

#include "otcoreset/common.hpp"
#include "otcoreset/cost_matrix.hpp"
#include "otcoreset/greedy.hpp"
#include "otcoreset/ot_solver.hpp"
#include "otcoreset/report.hpp"

namespace otcoreset {

enum class MiDirection { kAdd, kRemove };

// Estimated change of the subset OT score from adding z (z not in S) or the
// score drop attributable to z (z in S), read off the duals of the current
// solve without re-solving.
struct MiEstimate {
  Index candidate = 0;
  MiDirection direction = MiDirection::kAdd;
  double value = 0.0;
  double y_hat = 0.0;  // maximizing knot
};

// f(j) = min over i in S \ {z} of (M(i, j) - u_i). `u` is indexed by position
// in `set`. Throws InputError when z is the only member of S.
std::vector<double> FValues(const PooCostMatrix& m, std::span<const Index> set,
                            std::span<const double> u, Index z);

// Direct evaluation: knots K_j = M(z, j) - f(j), y_hat = the R-th smallest
// knot with R = ceil(|V| / |S|), value = F(y_hat).
MiEstimate EstimateMi(const PooCostMatrix& m, std::span<const Index> set,
                      std::span<const double> u, Index z);

// Estimates for every training index through the shared dual envelope
// (parallel over candidates). Members of S get kRemove entries.
std::vector<MiEstimate> EstimateAllMi(const PooCostMatrix& m, std::span<const Index> set,
                                      std::span<const double> u);

// Ground truth by two exact OT solves: S(S + z) - S(S) for z outside S,
// S(S) - S(S - z) for z inside. Removal needs |S| >= 2.
double ExactMi(const PooCostMatrix& m, std::span<const Index> set, Index z,
               const SolverOptions& options = {});

struct PrunedCandidates {
  IndexList inner;  // members to try removing, largest estimate first
  IndexList outer;  // non-members to try adding, smallest estimate first
};

// k is clamped to the population on each side; ties go to the lowest index.
PrunedCandidates Prune(std::span<const MiEstimate> estimates, std::size_t k);

struct RefineOptions {
  std::size_t k = 10;
  std::size_t t_max = 200;
  SolverOptions solver;
};

struct RefineResult {
  CoresetState state;  // poo_score and duals filled
  std::vector<ExchangeRecord> log;
  RefineStats stats;
};

// Exchange refinement. Each iteration estimates MI for every index from the
// duals of the current subset solve, keeps the top-k removals and additions,
// and scans (removed, added) pairs in ascending order of est(added) -
// est(removed); the first pair whose exact subset OT beats the current score
// by more than 1e-12 * (1 + |score|) is committed. Stops when no pair
// improves or after t_max iterations. Requires |S| >= 2.
RefineResult RefineLoop(const PooCostMatrix& m, const CoresetState& initial,
                        const RefineOptions& options);

}  // namespace otcoreset

#endif  // OTCORESET_REFINE_HPP_
