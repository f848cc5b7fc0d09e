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

#include "otcoreset/pool_io.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <random>

#include "otcoreset/report.hpp"
#include "test_util.hpp"

namespace otcoreset {
namespace {

namespace fs = std::filesystem;

void WriteText(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string ReadText(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string ErrorOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

Pool RandomPool(std::uint64_t seed, std::size_t n, std::size_t dim, bool labeled) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> nd;
  std::uniform_real_distribution<float> ud(0, 5);
  std::vector<float> e(n * dim), g(n);
  for (float& x : e) x = nd(rng);
  for (float& x : g) x = ud(rng);
  std::optional<std::vector<std::int64_t>> labels;
  if (labeled) {
    labels.emplace(n);
    for (auto& l : *labels) l = static_cast<std::int64_t>(rng() % 4);
  }
  return Pool(PoolRole::kTraining, dim, std::move(e), std::move(g), std::move(labels));
}

TEST(PoolTest, RejectsInvalidContents) {
  EXPECT_NE(ErrorOf([] { Pool(PoolRole::kTraining, 2, {1, 2, 3}); }), "");
  EXPECT_NE(ErrorOf([] { Pool(PoolRole::kTraining, 1, {1, NAN}); }).find("row 1"),
            std::string::npos);
  EXPECT_NE(ErrorOf([] { Pool(PoolRole::kTraining, 1, {1, 2}, {0, -1}); }).find("row 1"),
            std::string::npos);
  EXPECT_NE(ErrorOf([] { Pool(PoolRole::kTraining, 1, {1, 2}, {}, std::vector<std::int64_t>{3}); }),
            "");
}

TEST(PoolTest, MissingGradientsAreZero) {
  const Pool p(PoolRole::kValidation, 2, {1, 2, 3, 4});
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p.GradNormsAsDouble(), (std::vector<double>{0, 0}));
  EXPECT_FALSE(p.labeled());
}

TEST(PoolTest, SubsetReindexes) {
  const Pool p = RandomPool(1, 6, 3, true);
  const Pool s = p.Subset(IndexList{4, 1});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_TRUE(std::ranges::equal(s.embedding(0), p.embedding(4)));
  EXPECT_EQ(s.grad_norms()[1], p.grad_norms()[1]);
  EXPECT_EQ(s.labels()[0], p.labels()[4]);
}

TEST(PoolIoTest, BinaryRoundTripIsBitExact) {
  const fs::path dir = testing::TempDir("pool_rt");
  for (bool labeled : {false, true}) {
    const Pool p = RandomPool(2, 37, 5, labeled);
    const PoolFiles f = SavePool(p, dir / "pool.gemb");
    const Pool q = LoadPool(f, PoolRole::kTraining, FileFormat::kBinary);
    EXPECT_TRUE(p == q);
    // Saving again reproduces identical bytes.
    const std::string first = ReadText(f.embeddings);
    SavePool(q, dir / "again.gemb");
    EXPECT_EQ(first, ReadText(dir / "again.gemb"));
  }
}

TEST(PoolIoTest, CsvRoundTrip) {
  const fs::path dir = testing::TempDir("pool_csv");
  WriteText(dir / "e.csv", "1,2.5\n-3,4e-2\n\n5, 6\n");
  WriteText(dir / "g.csv", "0.5\n1\n2\n");
  WriteText(dir / "l.csv", "0\n1\n1\n");
  const Pool p = LoadPool({dir / "e.csv", dir / "g.csv", dir / "l.csv"}, PoolRole::kTraining,
                          FileFormat::kCsv);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p.embedding(1)[1], 4e-2f);
  EXPECT_EQ(p.labels()[2], 1);
  EXPECT_EQ(p.grad_norms()[0], 0.5f);
}

TEST(PoolIoTest, CsvErrorsNameTheRow) {
  const fs::path dir = testing::TempDir("pool_err");
  WriteText(dir / "nan.csv", "1,2\n3,nan\n");
  EXPECT_NE(ErrorOf([&] { ReadEmbeddingsCsv(dir / "nan.csv"); }).find("row 2"),
            std::string::npos);
  WriteText(dir / "ragged.csv", "1,2\n3\n");
  EXPECT_NE(ErrorOf([&] { ReadEmbeddingsCsv(dir / "ragged.csv"); }).find("row 2"),
            std::string::npos);
  WriteText(dir / "text.csv", "1,x\n");
  EXPECT_NE(ErrorOf([&] { ReadEmbeddingsCsv(dir / "text.csv"); }).find("row 1"),
            std::string::npos);
  WriteText(dir / "empty.csv", "");
  EXPECT_NE(ErrorOf([&] { ReadEmbeddingsCsv(dir / "empty.csv"); }), "");
  WriteText(dir / "g.csv", "1\n-2\n");
  WriteText(dir / "e.csv", "0\n1\n");
  EXPECT_NE(ErrorOf([&] {
              LoadPool({dir / "e.csv", dir / "g.csv", std::nullopt}, PoolRole::kTraining,
                       FileFormat::kCsv);
            }).find("row 2"),
            std::string::npos);
  WriteText(dir / "l.csv", "1\n");
  EXPECT_NE(ErrorOf([&] {
              LoadPool({dir / "e.csv", std::nullopt, dir / "l.csv"}, PoolRole::kTraining,
                       FileFormat::kCsv);
            }),
            "");
  EXPECT_NE(ErrorOf([&] { ReadEmbeddingsCsv(dir / "missing.csv"); }), "");
}

TEST(PoolIoTest, BinaryRejectsCorruptFiles) {
  const fs::path dir = testing::TempDir("pool_bin");
  WriteText(dir / "bad.gemb", "XXXX");
  EXPECT_NE(ErrorOf([&] { ReadEmbeddingsBinary(dir / "bad.gemb"); }), "");
  WriteEmbeddingsBinary(dir / "ok.gemb", {2, 2, {1, 2, 3, 4}});
  std::string bytes = ReadText(dir / "ok.gemb");
  WriteText(dir / "short.gemb", bytes.substr(0, bytes.size() - 2));
  EXPECT_NE(ErrorOf([&] { ReadEmbeddingsBinary(dir / "short.gemb"); }), "");
  WriteEmbeddingsBinary(dir / "inf.gemb", {2, 1, {1, INFINITY}});
  EXPECT_NE(ErrorOf([&] { ReadEmbeddingsBinary(dir / "inf.gemb"); }).find("row 1"),
            std::string::npos);
}

TEST(IndexFileTest, SortedRoundTrip) {
  const fs::path dir = testing::TempDir("idx");
  WriteIndexFile(dir / "s.idx", {7, 1, 3});
  EXPECT_EQ(ReadText(dir / "s.idx"), "1\n3\n7\n");
  EXPECT_EQ(ReadIndexFile(dir / "s.idx"), (IndexList{1, 3, 7}));
  EXPECT_EQ(IndexFilePath("out/sel.json"), fs::path("out/sel.idx"));
}

TEST(FormatTest, FromExtension) {
  EXPECT_EQ(FormatFromExtension("a.csv"), FileFormat::kCsv);
  EXPECT_EQ(FormatFromExtension("a.txt"), FileFormat::kCsv);
  EXPECT_EQ(FormatFromExtension("a.gemb"), FileFormat::kBinary);
}

TEST(ReportTest, JsonRoundTrip) {
  SelectionReport r;
  r.selected_indices = {1, 4};
  r.greedy_score = 2.5;
  r.final_score = 2.0;
  r.score_trajectory = {{0, 2.5}, {1, 2.0}};
  r.exchange_log = {{3, 4, 2.5, 2.0, 2, 0.01}};
  r.refine.termination = Termination::kNoImprovement;
  r.warnings = {"w"};
  const SelectionReport q = ReportFromJson(ToJson(r));
  EXPECT_EQ(q.selected_indices, r.selected_indices);
  EXPECT_EQ(q.final_score, 2.0);
  ASSERT_EQ(q.exchange_log.size(), 1u);
  EXPECT_EQ(q.exchange_log[0].added, 4);
  EXPECT_EQ(q.refine.termination, Termination::kNoImprovement);
  EXPECT_EQ(ToJson(q), ToJson(r));
}

TEST(ReportTest, ValidateCatchesBadReports) {
  SelectionReport r;
  r.selected_indices = {1, 1};
  EXPECT_THROW(ValidateReport(r, 5), InvariantError);
  r.selected_indices = {1, 5};
  EXPECT_THROW(ValidateReport(r, 5), InvariantError);
  r.selected_indices = {1, 2};
  r.score_trajectory = {{0, 1.0}, {1, 2.0}};
  EXPECT_THROW(ValidateReport(r, 5), InvariantError);
}

TEST(ReportTest, SaveWritesSortedIndexAndExplicitEmptyLists) {
  const fs::path dir = testing::TempDir("report");
  SelectionReport r;
  r.selected_indices = {3, 1, 7};
  SaveReport(r, dir / "sel.json");
  EXPECT_EQ(ReadText(dir / "sel.idx"), "1\n3\n7\n");
  const nlohmann::json doc = nlohmann::json::parse(ReadText(dir / "sel.json"));
  ASSERT_TRUE(doc.contains("exchange_log"));
  EXPECT_TRUE(doc["exchange_log"].is_array());
  EXPECT_TRUE(doc["exchange_log"].empty());
  EXPECT_EQ(Sorted(LoadReport(dir / "sel.json").selected_indices), (IndexList{1, 3, 7}));
  EXPECT_THROW(SaveReport(r, dir / "no" / "such" / "dir.json"), InputError);
}

TEST(PoolIoTest, SmallCsvWithoutSidecars) {
  const fs::path dir = testing::TempDir("pool_small");
  WriteText(dir / "e.csv", "1.0,2.0\n3.0,4.0");
  const Pool p = LoadPool(dir / "e.csv", PoolRole::kTraining, FileFormat::kCsv);
  EXPECT_EQ(p.size(), 2u);
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p.GradNormsAsDouble(), (std::vector<double>{0, 0}));
}

TEST(PoolIoTest, BinaryHeaderExample) {
  const fs::path dir = testing::TempDir("pool_hdr");
  WriteEmbeddingsBinary(dir / "p.gemb", {3, 2, {1, 2, 3, 4, 5, 6}});
  const Pool p = LoadPool(dir / "p.gemb", PoolRole::kTraining, FileFormat::kBinary);
  EXPECT_EQ(p.size(), 3u);
  EXPECT_EQ(p.dim(), 2u);
  EXPECT_EQ(p.embedding(2)[1], 6.0f);
}

}  // namespace
}  // namespace otcoreset
