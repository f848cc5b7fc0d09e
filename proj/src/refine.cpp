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

#include "otcoreset/refine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "otcoreset/kernels.hpp"

namespace otcoreset {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Position of z in `set`, or -1.
Index PositionOf(std::span<const Index> set, Index z) {
  const auto it = std::find(set.begin(), set.end(), z);
  return it == set.end() ? -1 : static_cast<Index>(it - set.begin());
}

void CheckDualShape(const PooCostMatrix& m, std::span<const Index> set,
                    std::span<const double> u) {
  if (set.empty()) throw InputError("MI estimation requires a non-empty set");
  if (u.size() != set.size()) throw InputError("duals do not match the set size");
  ValidateIndexSet(set, m.rows(), "coreset");
}

}  // namespace

std::vector<double> FValues(const PooCostMatrix& m, std::span<const Index> set,
                            std::span<const double> u, Index z) {
  CheckDualShape(m, set, u);
  if (z < 0 || static_cast<std::size_t>(z) >= m.rows())
    throw InputError("candidate " + std::to_string(z) + " out of range");
  const Index pos = PositionOf(set, z);
  if (pos >= 0 && set.size() == 1)
    throw InputError("removal estimate undefined for a single-element set");
  std::vector<double> f(m.cols(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < set.size(); ++k) {
    if (static_cast<Index>(k) == pos) continue;
    const auto row = m.row(static_cast<std::size_t>(set[k]));
    for (std::size_t j = 0; j < m.cols(); ++j) f[j] = std::min(f[j], row[j] - u[k]);
  }
  return f;
}

MiEstimate EstimateMi(const PooCostMatrix& m, std::span<const Index> set,
                      std::span<const double> u, Index z) {
  std::vector<double> knots = FValues(m, set, u, z);
  const auto row = m.row(static_cast<std::size_t>(z));
  for (std::size_t j = 0; j < knots.size(); ++j) knots[j] = row[j] - knots[j];
  const kernels::KnotEstimate k = kernels::MaximizeKnotObjective(knots, set.size());
  const bool member = PositionOf(set, z) >= 0;
  return {z, member ? MiDirection::kRemove : MiDirection::kAdd, k.value, k.y_hat};
}

std::vector<MiEstimate> EstimateAllMi(const PooCostMatrix& m, std::span<const Index> set,
                                      std::span<const double> u) {
  CheckDualShape(m, set, u);
  std::vector<Index> member_pos(m.rows(), -1);
  for (std::size_t k = 0; k < set.size(); ++k) member_pos[set[k]] = static_cast<Index>(k);
  const kernels::DualEnvelope env = kernels::omp::BuildEnvelope(m, set, u);
  std::vector<kernels::KnotEstimate> raw(m.rows());
  kernels::omp::Estimates(m, env, member_pos, set.size(), raw);
  std::vector<MiEstimate> out(m.rows());
  for (std::size_t z = 0; z < m.rows(); ++z)
    out[z] = {static_cast<Index>(z),
              member_pos[z] >= 0 ? MiDirection::kRemove : MiDirection::kAdd, raw[z].value,
              raw[z].y_hat};
  return out;
}

double ExactMi(const PooCostMatrix& m, std::span<const Index> set, Index z,
               const SolverOptions& options) {
  const Index pos = PositionOf(set, z);
  IndexList other(set.begin(), set.end());
  if (pos < 0) {
    other.push_back(z);
    return SolveOtOnSubset(m, other, options).objective -
           SolveOtOnSubset(m, set, options).objective;
  }
  if (set.size() < 2) throw InputError("removal MI undefined for a single-element set");
  other.erase(other.begin() + pos);
  return SolveOtOnSubset(m, set, options).objective -
         SolveOtOnSubset(m, other, options).objective;
}

PrunedCandidates Prune(std::span<const MiEstimate> estimates, std::size_t k) {
  std::vector<const MiEstimate*> inner, outer;
  for (const MiEstimate& e : estimates)
    (e.direction == MiDirection::kRemove ? inner : outer).push_back(&e);
  auto take = [k](std::vector<const MiEstimate*>& v, auto better) {
    const std::size_t keep = std::min(k, v.size());
    std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(keep), v.end(),
                      better);
    IndexList out;
    for (std::size_t i = 0; i < keep; ++i) out.push_back(v[i]->candidate);
    return out;
  };
  PrunedCandidates p;
  p.outer = take(outer, [](const MiEstimate* a, const MiEstimate* b) {
    return a->value != b->value ? a->value < b->value : a->candidate < b->candidate;
  });
  p.inner = take(inner, [](const MiEstimate* a, const MiEstimate* b) {
    return a->value != b->value ? a->value > b->value : a->candidate < b->candidate;
  });
  return p;
}

RefineResult RefineLoop(const PooCostMatrix& m, const CoresetState& initial,
                        const RefineOptions& options) {
  if (initial.selected.size() < 2)
    throw InputError("refinement requires at least two selected rows");
  if (options.k < 1) throw InputError("pruning width k must be at least 1");
  ValidateIndexSet(initial.selected, m.rows(), "coreset");

  RefineResult result;
  IndexList set = initial.selected;
  TransportSolution current = SolveOtOnSubset(m, set, options.solver);
  ++result.stats.ot_solves;

  std::size_t first_pair_hits = 0;
  double accepted_seconds = 0.0;
  result.stats.termination = Termination::kIterationCap;
  for (std::size_t t = 0; t < options.t_max; ++t) {
    const auto iteration_start = Clock::now();
    ++result.stats.iterations;
    const std::vector<MiEstimate> est = EstimateAllMi(m, set, current.dual_u);
    const PrunedCandidates pruned = Prune(est, options.k);
    if (pruned.outer.empty() || pruned.inner.empty()) {
      result.stats.termination = Termination::kNoCandidates;
      break;
    }

    struct Pair {
      double key;
      Index removed, added;
    };
    std::vector<Pair> pairs;
    pairs.reserve(pruned.inner.size() * pruned.outer.size());
    for (Index i : pruned.inner)
      for (Index o : pruned.outer) pairs.push_back({est[o].value - est[i].value, i, o});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.key != b.key) return a.key < b.key;
      if (a.removed != b.removed) return a.removed < b.removed;
      return a.added < b.added;
    });

    const double score = current.objective;
    const double threshold = score - 1e-12 * (1.0 + std::abs(score));
    bool accepted = false;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      IndexList candidate = set;
      *std::find(candidate.begin(), candidate.end(), pairs[p].removed) = pairs[p].added;
      TransportSolution trial = SolveOtOnSubset(m, candidate, options.solver);
      ++result.stats.ot_solves;
      ++result.stats.pairs_tested;
      if (trial.objective < threshold) {
        if (p == 0) ++first_pair_hits;
        const double seconds = SecondsSince(iteration_start);
        accepted_seconds += seconds;
        result.log.push_back(
            {pairs[p].removed, pairs[p].added, score, trial.objective, p + 1, seconds});
        set = std::move(candidate);
        current = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.stats.termination = Termination::kNoImprovement;
      break;
    }
  }
  if (result.stats.iterations > 0)
    result.stats.pass_at_1 =
        static_cast<double>(first_pair_hits) / static_cast<double>(result.stats.iterations);
  if (!result.log.empty())
    result.stats.avg_seconds_per_exchange =
        accepted_seconds / static_cast<double>(result.log.size());

  result.state = CoresetState::FromSet(m, set);
  result.state.poo_score = current.objective;
  result.state.duals = current.dual_u;
  return result;
}

}  // namespace otcoreset
