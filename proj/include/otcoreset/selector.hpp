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

#ifndef OTCORESET_SELECTOR_HPP_
#define OTCORESET_SELECTOR_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "otcoreset/common.hpp"
#include "otcoreset/cost_matrix.hpp"
#include "otcoreset/pool_io.hpp"
#include "otcoreset/report.hpp"

namespace otcoreset {

struct SelectionConfig {
  std::size_t budget = 0;
  double lambda = 0.1;
  std::size_t k = 10;
  std::size_t t_max = 200;
  std::uint64_t seed = 0;
  bool normalize_grad = false;
  bool labeled = false;
  bool redistribute_remainder = false;
  Metric metric = Metric::kEuclidean;

  void Validate(std::size_t train_size) const;
  nlohmann::json ToJson() const;
};

struct ClassSlice {
  std::int64_t label = 0;
  IndexList train;  // global training indices of this class
  IndexList val;    // global validation indices of this class
  double proportion = 0.0;
  std::size_t budget = 0;
};

struct ClassPartition {
  std::vector<ClassSlice> classes;  // ascending label
  std::vector<std::string> warnings;
};

// Per-class budgets n_k = floor(n * |V_k| / |V|), clamped to |T_k|. With
// `redistribute`, the unassigned remainder goes one unit at a time to classes
// by largest fractional part (ties by label) until n or every cap is reached.
// Throws InputError when a validation class has no training points.
ClassPartition PartitionByClass(std::span<const std::int64_t> train_labels,
                                std::span<const std::int64_t> val_labels,
                                std::size_t budget, bool redistribute);

// OT between the subset and the validation pool under D, minus lambda times
// the subset's mean gradient norm.
struct PooScoreParts {
  double score = 0.0;
  double ot = 0.0;
  double grad_bonus = 0.0;  // lambda * mean_S g
};
PooScoreParts PooScore(const DistanceMatrix& d, std::span<const double> g, double lambda,
                       std::span<const Index> set);

// Greedy initialization then exchange refinement on a prebuilt cost matrix.
SelectionReport SelectOnMatrix(const PooCostMatrix& m, const SelectionConfig& config);

SelectionReport Select(const SelectionConfig& config, const Pool& train, const Pool& val);

// One independent selection per class; the union is returned with per-class
// sub-reports. Scores of the union are proportion-weighted sums of the class
// scores.
SelectionReport SelectLabeled(const SelectionConfig& config, const Pool& train,
                              const Pool& val);
// Same, processing classes in the given label order.
SelectionReport SelectLabeledInOrder(const SelectionConfig& config, const Pool& train,
                                     const Pool& val,
                                     std::span<const std::int64_t> label_order);

// Uniform sample of n distinct indices from [0, train_size), sorted;
// deterministic per seed.
IndexList RandomBaseline(std::uint64_t seed, std::size_t n, std::size_t train_size);

}  // namespace otcoreset

#endif  // OTCORESET_SELECTOR_HPP_
