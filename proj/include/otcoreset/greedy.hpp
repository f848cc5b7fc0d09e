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

#ifndef OTCORESET_GREEDY_HPP_
#define OTCORESET_GREEDY_HPP_

#include <optional>
#include <span>
#include <vector>

#include "otcoreset/common.hpp"
#include "otcoreset/cost_matrix.hpp"

namespace otcoreset {

// A coreset under construction. col_mins(j) = min over selected rows of
// M(., j), +inf while nothing is selected.
struct CoresetState {
  IndexList selected;  // insertion order
  std::vector<double> col_mins;
  double relaxed_score = 0.0;
  std::optional<double> poo_score;
  std::optional<std::vector<double>> duals;  // u over `selected`, same order

  static CoresetState Empty(const PooCostMatrix& m);
  static CoresetState FromSet(const PooCostMatrix& m, IndexList set);

  bool Contains(Index z) const;
  // Adds z and refreshes col_mins and relaxed_score. Clears cached OT data.
  void Add(const PooCostMatrix& m, Index z);
};

// Mean over columns of the column minima over `set`: the optimum of the OT
// problem once column masses are kept but per-row masses are dropped. A lower
// bound on the subset OT value.
double RelaxedScore(const PooCostMatrix& m, std::span<const Index> set);
std::vector<double> ColumnMinima(const PooCostMatrix& m, std::span<const Index> set);

// Marginal change of the (unnormalized) column-minimum sum from adding z:
// sum_j min(M(z, j) - col_mins(j), 0). With an empty state it is the row sum.
double Gain(const PooCostMatrix& m, const CoresetState& state, Index z);

struct GreedyResult {
  CoresetState state;
  std::vector<double> gains;               // gain of the pick at each step
  std::vector<double> relaxed_trajectory;  // relaxed score after each step
};

// Starts from the empty set and repeatedly adds the candidate with the
// smallest gain (lowest index on ties) until `budget` rows are selected.
GreedyResult GreedySelect(const PooCostMatrix& m, std::size_t budget);

}  // namespace otcoreset

#endif  // OTCORESET_GREEDY_HPP_
