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

#ifndef OTCORESET_ORACLE_HPP_
#define OTCORESET_ORACLE_HPP_

// Independent ground truth for the selection heuristics. Nothing here uses
// the greedy or refinement code; brute force scores subsets with the exact
// OT solver only.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "otcoreset/common.hpp"
#include "otcoreset/cost_matrix.hpp"
#include "otcoreset/pool_io.hpp"

namespace otcoreset::oracle {

inline constexpr std::uint64_t kMaxBruteForceSubsets = 100000;

struct ScoredSubset {
  IndexList subset;  // ascending
  double score = 0.0;
};

struct BruteForceResult {
  IndexList best;
  double best_score = 0.0;
  std::vector<ScoredSubset> table;  // lexicographic subset order
};

// C(n, k), saturating at UINT64_MAX.
std::uint64_t Binomial(std::uint64_t n, std::uint64_t k);

// Scores every size-n subset by exact subset OT. Throws InputError when
// C(rows, n) exceeds kMaxBruteForceSubsets.
BruteForceResult BruteForceBest(const PooCostMatrix& m, std::size_t n);

// Fraction of table scores strictly below `score`.
double PercentileOf(const BruteForceResult& result, double score);

// OT between equal-size uniform point clouds on a line with |x - y| cost:
// mean absolute difference of the sorted samples.
double Ot1d(std::vector<double> xs, std::vector<double> ys);

// f(z) = min over anchors a of (value_a + d(z, a)), a 1-Lipschitz function.
// Returns f on the points of `a` and of `b`.
std::pair<std::vector<double>, std::vector<double>> LipschitzProbe(
    const Pool& a, const Pool& b, const Pool& anchors, std::span<const double> values,
    Metric metric = Metric::kEuclidean);

enum class GradModel { kConstant, kUniform, kLognormal };
GradModel GradModelFromString(const std::string& name);

struct SynthOptions {
  std::uint64_t seed = 0;
  std::size_t n_train = 100;
  std::size_t n_val = 50;
  std::size_t dim = 8;
  std::size_t n_clusters = 4;
  double center_spread = 4.0;
  double cluster_std = 1.0;
  // Validation centers move by this distance along a seed-dependent
  // direction.
  double val_shift = 0.0;
  GradModel grad_model = GradModel::kUniform;
  double grad_scale = 1.0;
  // Scale gradient norms by 1 + (distance to own center) / cluster radius,
  // so outlying points carry larger norms.
  bool grad_distance_correlated = false;
  // 0 = unlabeled; otherwise label = cluster id mod n_labels.
  std::size_t n_labels = 0;
};

// Gaussian-mixture training and validation pools sharing cluster centers.
// Validation points carry zero gradient norms. Deterministic per seed.
std::pair<Pool, Pool> SynthPools(const SynthOptions& options);

}  // namespace otcoreset::oracle

#endif  // OTCORESET_ORACLE_HPP_
