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

#ifndef OTCORESET_REPORT_HPP_
#define OTCORESET_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "otcoreset/common.hpp"

namespace otcoreset {

// One accepted exchange. Only improving exchanges are recorded, so
// score_after < score_before always holds.
struct ExchangeRecord {
  Index removed = 0;
  Index added = 0;
  double score_before = 0.0;
  double score_after = 0.0;
  std::size_t candidates_tested = 0;
  double seconds = 0.0;
};

struct TrajectoryPoint {
  std::size_t iteration = 0;
  double score = 0.0;
};

struct PhaseTiming {
  std::string phase;
  double seconds = 0.0;
};

enum class Termination { kNotRun, kNoImprovement, kIterationCap, kNoCandidates };
std::string ToString(Termination t);

struct RefineStats {
  std::size_t iterations = 0;
  std::size_t ot_solves = 0;
  std::size_t pairs_tested = 0;
  // Fraction of iterations whose first scanned pair was accepted.
  double pass_at_1 = 0.0;
  double avg_seconds_per_exchange = 0.0;
  Termination termination = Termination::kNotRun;
};

struct ClassReport;

struct SelectionReport {
  IndexList selected_indices;  // sorted
  double greedy_score = 0.0;   // POO score of the greedy initial set
  double final_score = 0.0;
  // Relaxed (column-minimum) objective after each greedy step.
  std::vector<double> greedy_relaxed_trajectory;
  std::vector<double> greedy_gains;
  // Iteration 0 is the greedy set; one point per accepted exchange after.
  std::vector<TrajectoryPoint> score_trajectory;
  std::vector<ExchangeRecord> exchange_log;
  RefineStats refine;
  nlohmann::json config_echo = nlohmann::json::object();
  std::vector<PhaseTiming> timings;
  std::vector<ClassReport> classes;
  std::vector<std::string> warnings;
};

// Per-class outcome of label-enhanced selection. Indices in `report` are
// global training indices.
struct ClassReport {
  std::int64_t label = 0;
  std::size_t train_count = 0;
  std::size_t val_count = 0;
  double proportion = 0.0;           // |V_k| / |V|
  std::size_t budget = 0;            // n_k
  double realized_proportion = 0.0;  // |S_k| / |S|
  bool skipped = false;
  SelectionReport report;
};

// Throws InvariantError if selected indices are not distinct and within
// [0, train_size), or if the refinement trajectory increases.
void ValidateReport(const SelectionReport& report, std::size_t train_size);

nlohmann::json ToJson(const SelectionReport& report);
SelectionReport ReportFromJson(const nlohmann::json& doc);

// "<report path with extension replaced by .idx>".
std::filesystem::path IndexFilePath(const std::filesystem::path& report_path);

// Writes the JSON report and the sorted index file next to it.
void SaveReport(const SelectionReport& report,
                const std::filesystem::path& path);
SelectionReport LoadReport(const std::filesystem::path& path);

}  // namespace otcoreset

#endif  // OTCORESET_REPORT_HPP_
