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

#include <gtest/gtest.h>

#include <random>

#include "otcoreset/ot_solver.hpp"
#include "otcoreset/oracle.hpp"
#include "test_util.hpp"

namespace otcoreset {
namespace {

std::vector<std::int64_t> Labels(std::initializer_list<std::pair<std::int64_t, int>> runs) {
  std::vector<std::int64_t> out;
  for (auto [label, count] : runs) out.insert(out.end(), count, label);
  return out;
}

TEST(PartitionTest, FloorBudgets) {
  const auto train = Labels({{0, 700}, {1, 300}});
  const auto val = Labels({{0, 70}, {1, 30}});
  const ClassPartition p = PartitionByClass(train, val, 64, false);
  ASSERT_EQ(p.classes.size(), 2u);
  EXPECT_EQ(p.classes[0].budget, 44u);
  EXPECT_EQ(p.classes[1].budget, 19u);
  EXPECT_DOUBLE_EQ(p.classes[0].proportion, 0.7);
}

TEST(PartitionTest, RedistributeByFraction) {
  const auto train = Labels({{0, 700}, {1, 300}});
  const auto val = Labels({{0, 70}, {1, 30}});
  // 44.8 and 19.2: the single leftover unit goes to class 0.
  const ClassPartition p = PartitionByClass(train, val, 64, true);
  EXPECT_EQ(p.classes[0].budget, 45u);
  EXPECT_EQ(p.classes[1].budget, 19u);
}

TEST(PartitionTest, RedistributeTiesByLabel) {
  const auto train = Labels({{3, 10}, {5, 10}});
  const auto val = Labels({{3, 1}, {5, 1}});
  const ClassPartition p = PartitionByClass(train, val, 3, true);
  EXPECT_EQ(p.classes[0].budget, 2u);
  EXPECT_EQ(p.classes[1].budget, 1u);
}

TEST(PartitionTest, ClampsWithWarning) {
  const auto train = Labels({{0, 2}, {1, 50}});
  const auto val = Labels({{0, 5}, {1, 5}});
  const ClassPartition p = PartitionByClass(train, val, 10, false);
  EXPECT_EQ(p.classes[0].budget, 2u);
  EXPECT_EQ(p.classes[1].budget, 5u);
  EXPECT_EQ(p.warnings.size(), 1u);
}

TEST(PartitionTest, ZeroBudgetClassIsSkipped) {
  const auto train = Labels({{0, 50}, {1, 50}});
  const auto val = Labels({{0, 99}, {1, 1}});
  const ClassPartition p = PartitionByClass(train, val, 10, false);
  EXPECT_EQ(p.classes[1].budget, 0u);
  EXPECT_FALSE(p.warnings.empty());
}

TEST(PartitionTest, MissingTrainingClassIsAnError) {
  const auto train = Labels({{0, 5}});
  const auto val = Labels({{0, 2}, {7, 1}});
  EXPECT_THROW(PartitionByClass(train, val, 3, false), InputError);
}

TEST(PooScoreTest, SplitsIntoParts) {
  DistanceMatrix d;
  d.entries = Matrix::FromRows({{1, 3}, {2, 1}, {5, 5}});
  const std::vector<double> g{1.0, 3.0, 0.0};
  const PooScoreParts p = PooScore(d, g, 0.5, IndexList{0, 1});
  EXPECT_DOUBLE_EQ(p.ot, 1.0);
  EXPECT_DOUBLE_EQ(p.grad_bonus, 1.0);
  EXPECT_DOUBLE_EQ(p.score, 0.0);
  // The shifted cost matrix gives the same value.
  const PooCostMatrix m = BuildPooMatrix(d, g, 0.5);
  EXPECT_NEAR(SolveOtOnSubset(m, IndexList{0, 1}).objective, p.score, 1e-12);
}

TEST(SelectOnMatrixTest, ReportIsConsistent) {
  std::mt19937_64 rng(31);
  const PooCostMatrix m = testing::RandomPoo(rng, 40, 17);
  SelectionConfig c;
  c.budget = 6;
  c.k = 5;
  const SelectionReport r = SelectOnMatrix(m, c);
  EXPECT_EQ(r.selected_indices.size(), 6u);
  EXPECT_LE(r.final_score, r.greedy_score);
  EXPECT_NEAR(SolveOtOnSubset(m, r.selected_indices).objective, r.final_score, 1e-12);
  ASSERT_EQ(r.score_trajectory.size(), r.exchange_log.size() + 1);
  for (std::size_t t = 1; t < r.score_trajectory.size(); ++t)
    EXPECT_LT(r.score_trajectory[t].score, r.score_trajectory[t - 1].score);
  EXPECT_EQ(r.greedy_gains.size(), 6u);
}

TEST(SelectOnMatrixTest, BudgetOneSkipsRefinement) {
  std::mt19937_64 rng(32);
  const PooCostMatrix m = testing::RandomPoo(rng, 12, 5);
  SelectionConfig c;
  c.budget = 1;
  const SelectionReport r = SelectOnMatrix(m, c);
  EXPECT_EQ(r.refine.iterations, 0u);
  EXPECT_EQ(r.selected_indices, oracle::BruteForceBest(m, 1).best);
}

TEST(SelectOnMatrixTest, FullBudgetSelectsEverything) {
  std::mt19937_64 rng(33);
  const PooCostMatrix m = testing::RandomPoo(rng, 5, 4);
  SelectionConfig c;
  c.budget = 5;
  EXPECT_EQ(SelectOnMatrix(m, c).selected_indices, (IndexList{0, 1, 2, 3, 4}));
}

TEST(SelectionConfigTest, Validation) {
  SelectionConfig c;
  c.budget = 0;
  EXPECT_THROW(c.Validate(10), InputError);
  c.budget = 11;
  EXPECT_THROW(c.Validate(10), InputError);
  c.budget = 3;
  c.lambda = -1;
  EXPECT_THROW(c.Validate(10), InputError);
  c.lambda = 0.1;
  c.k = 0;
  EXPECT_THROW(c.Validate(10), InputError);
  c.k = 1;
  EXPECT_NO_THROW(c.Validate(10));
}

TEST(SelectTest, DeterministicAndLambdaZeroIgnoresGradients) {
  oracle::SynthOptions o;
  o.seed = 4;
  o.n_train = 60;
  o.n_val = 20;
  auto [train, val] = oracle::SynthPools(o);
  SelectionConfig c;
  c.budget = 5;
  c.lambda = 0.0;
  const SelectionReport a = Select(c, train, val);
  EXPECT_EQ(a.selected_indices, Select(c, train, val).selected_indices);
  const Pool flat(PoolRole::kTraining, train.dim(),
                  std::vector<float>(train.embeddings().begin(), train.embeddings().end()));
  EXPECT_EQ(a.selected_indices, Select(c, flat, val).selected_indices);
}

TEST(SelectLabeledTest, SingleClassEqualsUnlabeled) {
  oracle::SynthOptions o;
  o.seed = 5;
  o.n_train = 50;
  o.n_val = 20;
  o.n_labels = 1;
  auto [train, val] = oracle::SynthPools(o);
  SelectionConfig c;
  c.budget = 4;
  const SelectionReport a = SelectLabeled(c, train, val);
  const SelectionReport b = Select(c, train, val);
  EXPECT_EQ(a.selected_indices, b.selected_indices);
  EXPECT_NEAR(a.final_score, b.final_score, 1e-12);
}

TEST(SelectLabeledTest, ClassOrderDoesNotMatter) {
  oracle::SynthOptions o;
  o.seed = 6;
  o.n_train = 80;
  o.n_val = 40;
  o.n_labels = 3;
  auto [train, val] = oracle::SynthPools(o);
  SelectionConfig c;
  c.budget = 9;
  const std::vector<std::int64_t> fwd{0, 1, 2}, rev{2, 1, 0};
  const SelectionReport a = SelectLabeledInOrder(c, train, val, fwd);
  const SelectionReport b = SelectLabeledInOrder(c, train, val, rev);
  EXPECT_EQ(a.selected_indices, b.selected_indices);
  for (const ClassReport& cr : a.classes)
    for (Index i : cr.report.selected_indices) EXPECT_EQ(train.labels()[i], cr.label);
}

TEST(SelectLabeledTest, NeedsLabels) {
  oracle::SynthOptions o;
  o.n_train = 20;
  o.n_val = 5;
  auto [train, val] = oracle::SynthPools(o);
  SelectionConfig c;
  c.budget = 2;
  EXPECT_THROW(SelectLabeled(c, train, val), InputError);
}

TEST(RandomBaselineTest, SortedDistinctDeterministic) {
  const IndexList a = RandomBaseline(9, 10, 100);
  EXPECT_EQ(a, RandomBaseline(9, 10, 100));
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_NO_THROW(ValidateIndexSet(a, 100, "baseline"));
  EXPECT_THROW(RandomBaseline(1, 0, 5), InputError);
  EXPECT_THROW(RandomBaseline(1, 6, 5), InputError);
}

}  // namespace
}  // namespace otcoreset
