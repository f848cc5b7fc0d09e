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

#include "otcoreset/greedy.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "otcoreset/kernels.hpp"

namespace otcoreset {

namespace {

double MeanOf(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

void CheckCandidate(const PooCostMatrix& m, Index z) {
  if (z < 0 || static_cast<std::size_t>(z) >= m.rows()) {
    std::ostringstream os;
    os << "candidate " << z << " is outside [0, " << m.rows() << ")";
    throw InputError(os.str());
  }
}

}  // namespace

CoresetState CoresetState::Empty(const PooCostMatrix& m) {
  CoresetState s;
  s.col_mins.assign(m.cols(), std::numeric_limits<double>::infinity());
  s.relaxed_score = std::numeric_limits<double>::infinity();
  return s;
}

CoresetState CoresetState::FromSet(const PooCostMatrix& m, IndexList set) {
  ValidateIndexSet(set, m.rows(), "coreset");
  CoresetState s = Empty(m);
  for (Index z : set) s.Add(m, z);
  return s;
}

bool CoresetState::Contains(Index z) const {
  return std::find(selected.begin(), selected.end(), z) != selected.end();
}

void CoresetState::Add(const PooCostMatrix& m, Index z) {
  CheckCandidate(m, z);
  if (Contains(z)) throw InputError("index " + std::to_string(z) + " is already selected");
  const auto row = m.row(static_cast<std::size_t>(z));
  for (std::size_t j = 0; j < col_mins.size(); ++j) col_mins[j] = std::min(col_mins[j], row[j]);
  selected.push_back(z);
  relaxed_score = MeanOf(col_mins);
  poo_score.reset();
  duals.reset();
}

std::vector<double> ColumnMinima(const PooCostMatrix& m, std::span<const Index> set) {
  std::vector<double> mins(m.cols(), std::numeric_limits<double>::infinity());
  for (Index i : set) {
    const auto row = m.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < m.cols(); ++j) mins[j] = std::min(mins[j], row[j]);
  }
  return mins;
}

double RelaxedScore(const PooCostMatrix& m, std::span<const Index> set) {
  if (set.empty()) throw InputError("relaxed score of an empty set");
  ValidateIndexSet(set, m.rows(), "relaxed-score");
  return MeanOf(ColumnMinima(m, set));
}

double Gain(const PooCostMatrix& m, const CoresetState& state, Index z) {
  CheckCandidate(m, z);
  if (state.Contains(z))
    throw InputError("gain requested for member " + std::to_string(z));
  return kernels::Gain(m.row(static_cast<std::size_t>(z)), state.col_mins,
                       state.selected.empty());
}

GreedyResult GreedySelect(const PooCostMatrix& m, std::size_t budget) {
  if (budget < 1 || budget > m.rows()) {
    std::ostringstream os;
    os << "budget " << budget << " is outside [1, " << m.rows() << "]";
    throw InputError(os.str());
  }
  GreedyResult result;
  result.state = CoresetState::Empty(m);
  std::vector<char> in_set(m.rows(), 0);
  std::vector<double> gains(m.rows());
  for (std::size_t step = 0; step < budget; ++step) {
    kernels::omp::Gains(m, result.state.col_mins, in_set, result.state.selected.empty(),
                        gains);
    const std::size_t pick = kernels::ArgMin(gains);
    if (pick == gains.size()) throw InvariantError("greedy step found no candidate");
    result.gains.push_back(gains[pick]);
    result.state.Add(m, static_cast<Index>(pick));
    in_set[pick] = 1;
    result.relaxed_trajectory.push_back(result.state.relaxed_score);
  }
  return result;
}

}  // namespace otcoreset
