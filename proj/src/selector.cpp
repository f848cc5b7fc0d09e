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

#include "otcoreset/selector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "otcoreset/greedy.hpp"
#include "otcoreset/ot_solver.hpp"
#include "otcoreset/refine.hpp"

namespace otcoreset {

namespace {

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string MetricName(Metric m) {
  return m == Metric::kEuclidean ? "euclidean" : "manhattan";
}

}  // namespace

void SelectionConfig::Validate(std::size_t train_size) const {
  std::ostringstream os;
  if (budget < 1 || budget > train_size)
    os << "budget " << budget << " is outside [1, " << train_size << "]";
  else if (!(lambda >= 0.0) || !std::isfinite(lambda))
    os << "lambda must be a finite value >= 0, got " << lambda;
  else if (k < 1)
    os << "k must be at least 1";
  else
    return;
  throw InputError(os.str());
}

nlohmann::json SelectionConfig::ToJson() const {
  return {{"budget", budget},
          {"lambda", lambda},
          {"k", k},
          {"t_max", t_max},
          {"seed", seed},
          {"normalize_grad", normalize_grad},
          {"labeled", labeled},
          {"redistribute_remainder", redistribute_remainder},
          {"metric", MetricName(metric)}};
}

ClassPartition PartitionByClass(std::span<const std::int64_t> train_labels,
                                std::span<const std::int64_t> val_labels,
                                std::size_t budget, bool redistribute) {
  if (val_labels.empty()) throw InputError("validation pool is empty");
  std::map<std::int64_t, ClassSlice> by_label;
  for (std::size_t i = 0; i < train_labels.size(); ++i) {
    auto& c = by_label[train_labels[i]];
    c.label = train_labels[i];
    c.train.push_back(static_cast<Index>(i));
  }
  for (std::size_t j = 0; j < val_labels.size(); ++j) {
    auto it = by_label.find(val_labels[j]);
    if (it == by_label.end()) {
      std::ostringstream os;
      os << "validation class " << val_labels[j] << " (row " << j
         << ") has no training points";
      throw InputError(os.str());
    }
    it->second.val.push_back(static_cast<Index>(j));
  }

  ClassPartition part;
  const std::size_t val_total = val_labels.size();
  std::size_t assigned = 0;
  for (auto& [label, c] : by_label) {
    c.proportion = static_cast<double>(c.val.size()) / static_cast<double>(val_total);
    c.budget = budget * c.val.size() / val_total;
    if (c.budget > c.train.size()) {
      std::ostringstream os;
      os << "class " << label << ": budget " << c.budget << " clamped to its "
         << c.train.size() << " training points";
      part.warnings.push_back(os.str());
      c.budget = c.train.size();
    }
    assigned += c.budget;
    part.classes.push_back(std::move(c));
  }

  if (redistribute && assigned < budget) {
    // Fractional part of n * |V_k| / |V| is (n * |V_k|) mod |V|.
    std::vector<std::size_t> order(part.classes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return (budget * part.classes[a].val.size()) % val_total >
             (budget * part.classes[b].val.size()) % val_total;
    });
    bool progress = true;
    while (assigned < budget && progress) {
      progress = false;
      for (std::size_t idx : order) {
        ClassSlice& c = part.classes[idx];
        if (assigned == budget) break;
        if (c.val.empty() || c.budget >= c.train.size()) continue;
        ++c.budget;
        ++assigned;
        progress = true;
      }
    }
  }
  for (const ClassSlice& c : part.classes)
    if (c.budget == 0) {
      std::ostringstream os;
      os << "class " << c.label << " receives no budget and is skipped";
      part.warnings.push_back(os.str());
    }
  return part;
}

PooScoreParts PooScore(const DistanceMatrix& d, std::span<const double> g, double lambda,
                       std::span<const Index> set) {
  if (set.empty()) throw InputError("POO score of an empty set");
  if (g.size() != d.entries.rows())
    throw InputError("gradient norms do not match the distance matrix");
  PooScoreParts parts;
  parts.ot = SolveOtOnSubset(d.entries, set).objective;
  double sum = 0.0;
  for (Index i : set) sum += g[static_cast<std::size_t>(i)];
  parts.grad_bonus = lambda * sum / static_cast<double>(set.size());
  parts.score = parts.ot - parts.grad_bonus;
  return parts;
}

SelectionReport SelectOnMatrix(const PooCostMatrix& m, const SelectionConfig& config) {
  config.Validate(m.rows());
  SelectionReport report;
  report.config_echo = config.ToJson();

  auto start = Clock::now();
  GreedyResult greedy = GreedySelect(m, config.budget);
  report.timings.push_back({"greedy", SecondsSince(start)});
  report.greedy_gains = greedy.gains;
  report.greedy_relaxed_trajectory = greedy.relaxed_trajectory;

  start = Clock::now();
  if (config.budget >= 2) {
    RefineOptions options;
    options.k = config.k;
    options.t_max = config.t_max;
    RefineResult refined = RefineLoop(m, greedy.state, options);
    report.greedy_score = refined.log.empty() ? *refined.state.poo_score
                                              : refined.log.front().score_before;
    report.final_score = *refined.state.poo_score;
    report.selected_indices = Sorted(refined.state.selected);
    report.exchange_log = std::move(refined.log);
    report.refine = refined.stats;
  } else {
    // A single row's transport plan is forced, so the greedy pick (smallest
    // row sum) is already optimal.
    const double score = SolveOtOnSubset(m, greedy.state.selected).objective;
    report.greedy_score = report.final_score = score;
    report.selected_indices = Sorted(greedy.state.selected);
    report.refine.ot_solves = 1;
  }
  report.timings.push_back({"refine", SecondsSince(start)});

  report.score_trajectory.push_back({0, report.greedy_score});
  for (std::size_t e = 0; e < report.exchange_log.size(); ++e)
    report.score_trajectory.push_back({e + 1, report.exchange_log[e].score_after});
  ValidateReport(report, m.rows());
  return report;
}

namespace {

PooCostMatrix BuildCost(const SelectionConfig& config, const Pool& train, const Pool& val,
                        SelectionReport& timings_sink) {
  auto start = Clock::now();
  DistanceMatrix d = ComputeDistances(train, val, config.metric);
  timings_sink.timings.push_back({"distances", SecondsSince(start)});
  std::vector<double> g = train.GradNormsAsDouble();
  if (config.normalize_grad) g = MinMaxNormalize(g);
  return BuildPooMatrix(d, std::move(g), config.lambda);
}

}  // namespace

SelectionReport Select(const SelectionConfig& config, const Pool& train, const Pool& val) {
  config.Validate(train.size());
  if (val.size() == 0) throw InputError("validation pool is empty");
  SelectionReport prelude;
  const PooCostMatrix m = BuildCost(config, train, val, prelude);
  SelectionReport report = SelectOnMatrix(m, config);
  report.timings.insert(report.timings.begin(), prelude.timings.begin(),
                        prelude.timings.end());
  return report;
}

SelectionReport SelectLabeledInOrder(const SelectionConfig& config, const Pool& train,
                                     const Pool& val,
                                     std::span<const std::int64_t> label_order) {
  config.Validate(train.size());
  if (!train.labeled() || !val.labeled())
    throw InputError("label-enhanced selection needs labels on both pools");
  ClassPartition part =
      PartitionByClass(train.labels(), val.labels(), config.budget,
                       config.redistribute_remainder);

  SelectionReport report;
  report.config_echo = config.ToJson();
  report.warnings = part.warnings;
  report.classes.resize(part.classes.size());

  std::vector<std::size_t> order;
  for (std::int64_t label : label_order) {
    auto it = std::find_if(part.classes.begin(), part.classes.end(),
                           [&](const ClassSlice& c) { return c.label == label; });
    if (it == part.classes.end())
      throw InputError("class order names unknown label " + std::to_string(label));
    order.push_back(static_cast<std::size_t>(it - part.classes.begin()));
  }
  if (order.size() != part.classes.size() ||
      std::set<std::size_t>(order.begin(), order.end()).size() != order.size())
    throw InputError("class order must list every class exactly once");

  for (std::size_t idx : order) {
    const ClassSlice& c = part.classes[idx];
    ClassReport& cr = report.classes[idx];
    cr.label = c.label;
    cr.train_count = c.train.size();
    cr.val_count = c.val.size();
    cr.proportion = c.proportion;
    cr.budget = c.budget;
    if (c.budget == 0) {
      cr.skipped = true;
      continue;
    }
    const Pool sub_train = train.Subset(c.train);
    const Pool sub_val = val.Subset(c.val);
    SelectionConfig sub = config;
    sub.budget = c.budget;
    sub.labeled = false;
    cr.report = Select(sub, sub_train, sub_val);
    auto to_global = [&](Index local) { return c.train[static_cast<std::size_t>(local)]; };
    for (Index& i : cr.report.selected_indices) i = to_global(i);
    for (ExchangeRecord& e : cr.report.exchange_log) {
      e.removed = to_global(e.removed);
      e.added = to_global(e.added);
    }
    cr.report.selected_indices = Sorted(std::move(cr.report.selected_indices));
  }

  std::size_t total = 0;
  for (const ClassReport& cr : report.classes) {
    if (cr.skipped) continue;
    total += cr.report.selected_indices.size();
    report.selected_indices.insert(report.selected_indices.end(),
                                   cr.report.selected_indices.begin(),
                                   cr.report.selected_indices.end());
    report.greedy_score += cr.proportion * cr.report.greedy_score;
    report.final_score += cr.proportion * cr.report.final_score;
    report.refine.iterations += cr.report.refine.iterations;
    report.refine.ot_solves += cr.report.refine.ot_solves;
    report.refine.pairs_tested += cr.report.refine.pairs_tested;
  }
  for (ClassReport& cr : report.classes)
    cr.realized_proportion =
        total == 0 || cr.skipped
            ? 0.0
            : static_cast<double>(cr.report.selected_indices.size()) / static_cast<double>(total);
  report.selected_indices = Sorted(std::move(report.selected_indices));
  if (report.selected_indices.empty())
    throw InputError("no class received a positive budget");
  ValidateReport(report, train.size());
  return report;
}

SelectionReport SelectLabeled(const SelectionConfig& config, const Pool& train,
                              const Pool& val) {
  if (!train.labeled() || !val.labeled())
    throw InputError("label-enhanced selection needs labels on both pools");
  std::set<std::int64_t> labels(train.labels().begin(), train.labels().end());
  const std::vector<std::int64_t> order(labels.begin(), labels.end());
  return SelectLabeledInOrder(config, train, val, order);
}

IndexList RandomBaseline(std::uint64_t seed, std::size_t n, std::size_t train_size) {
  if (n < 1 || n > train_size) {
    std::ostringstream os;
    os << "random baseline size " << n << " is outside [1, " << train_size << "]";
    throw InputError(os.str());
  }
  IndexList all(train_size);
  std::iota(all.begin(), all.end(), Index{0});
  IndexList out;
  out.reserve(n);
  std::mt19937_64 rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(out), static_cast<std::ptrdiff_t>(n),
              rng);
  return Sorted(std::move(out));
}

}  // namespace otcoreset
