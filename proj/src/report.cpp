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

#include "otcoreset/report.hpp"

#include <fstream>
#include <sstream>

#include "otcoreset/pool_io.hpp"

namespace otcoreset {

using nlohmann::json;

std::string ToString(Termination t) {
  switch (t) {
    case Termination::kNotRun: return "not-run";
    case Termination::kNoImprovement: return "no-improvement";
    case Termination::kIterationCap: return "iteration-cap";
    case Termination::kNoCandidates: return "no-candidates";
  }
  return "unknown";
}

namespace {

Termination TerminationFromString(const std::string& s) {
  for (Termination t : {Termination::kNotRun, Termination::kNoImprovement,
                        Termination::kIterationCap, Termination::kNoCandidates})
    if (ToString(t) == s) return t;
  throw InputError("unknown termination '" + s + "'");
}

}  // namespace

void ValidateReport(const SelectionReport& report, std::size_t train_size) {
  try {
    ValidateIndexSet(report.selected_indices, train_size, "selected");
  } catch (const InputError& e) {
    throw InvariantError(e.what());
  }
  for (std::size_t k = 1; k < report.score_trajectory.size(); ++k)
    if (report.score_trajectory[k].score > report.score_trajectory[k - 1].score) {
      std::ostringstream os;
      os << "score trajectory increases at iteration "
         << report.score_trajectory[k].iteration;
      throw InvariantError(os.str());
    }
}

json ToJson(const SelectionReport& r) {
  json doc;
  doc["selected_indices"] = r.selected_indices;
  doc["greedy_score"] = r.greedy_score;
  doc["final_score"] = r.final_score;
  doc["greedy_relaxed_trajectory"] = r.greedy_relaxed_trajectory;
  doc["greedy_gains"] = r.greedy_gains;
  json traj = json::array();
  for (const auto& p : r.score_trajectory)
    traj.push_back({{"iteration", p.iteration}, {"score", p.score}});
  doc["score_trajectory"] = traj;
  json log = json::array();
  for (const auto& e : r.exchange_log)
    log.push_back({{"removed", e.removed},
                   {"added", e.added},
                   {"score_before", e.score_before},
                   {"score_after", e.score_after},
                   {"candidates_tested", e.candidates_tested},
                   {"seconds", e.seconds}});
  doc["exchange_log"] = log;
  doc["refine"] = {{"iterations", r.refine.iterations},
                   {"ot_solves", r.refine.ot_solves},
                   {"pairs_tested", r.refine.pairs_tested},
                   {"pass_at_1", r.refine.pass_at_1},
                   {"avg_seconds_per_exchange", r.refine.avg_seconds_per_exchange},
                   {"termination", ToString(r.refine.termination)}};
  doc["config"] = r.config_echo;
  json timings = json::array();
  for (const auto& t : r.timings)
    timings.push_back({{"phase", t.phase}, {"seconds", t.seconds}});
  doc["timings"] = timings;
  json classes = json::array();
  for (const auto& c : r.classes)
    classes.push_back({{"label", c.label},
                       {"train_count", c.train_count},
                       {"val_count", c.val_count},
                       {"proportion", c.proportion},
                       {"budget", c.budget},
                       {"realized_proportion", c.realized_proportion},
                       {"skipped", c.skipped},
                       {"report", ToJson(c.report)}});
  doc["classes"] = classes;
  doc["warnings"] = r.warnings;
  return doc;
}

SelectionReport ReportFromJson(const json& doc) {
  try {
    SelectionReport r;
    r.selected_indices = doc.at("selected_indices").get<IndexList>();
    r.greedy_score = doc.at("greedy_score").get<double>();
    r.final_score = doc.at("final_score").get<double>();
    r.greedy_relaxed_trajectory =
        doc.at("greedy_relaxed_trajectory").get<std::vector<double>>();
    r.greedy_gains = doc.at("greedy_gains").get<std::vector<double>>();
    for (const auto& p : doc.at("score_trajectory"))
      r.score_trajectory.push_back(
          {p.at("iteration").get<std::size_t>(), p.at("score").get<double>()});
    for (const auto& e : doc.at("exchange_log"))
      r.exchange_log.push_back({e.at("removed").get<Index>(), e.at("added").get<Index>(),
                                e.at("score_before").get<double>(),
                                e.at("score_after").get<double>(),
                                e.at("candidates_tested").get<std::size_t>(),
                                e.at("seconds").get<double>()});
    const auto& ref = doc.at("refine");
    r.refine.iterations = ref.at("iterations").get<std::size_t>();
    r.refine.ot_solves = ref.at("ot_solves").get<std::size_t>();
    r.refine.pairs_tested = ref.at("pairs_tested").get<std::size_t>();
    r.refine.pass_at_1 = ref.at("pass_at_1").get<double>();
    r.refine.avg_seconds_per_exchange = ref.at("avg_seconds_per_exchange").get<double>();
    r.refine.termination = TerminationFromString(ref.at("termination").get<std::string>());
    r.config_echo = doc.at("config");
    for (const auto& t : doc.at("timings"))
      r.timings.push_back({t.at("phase").get<std::string>(), t.at("seconds").get<double>()});
    for (const auto& c : doc.at("classes")) {
      ClassReport cr;
      cr.label = c.at("label").get<std::int64_t>();
      cr.train_count = c.at("train_count").get<std::size_t>();
      cr.val_count = c.at("val_count").get<std::size_t>();
      cr.proportion = c.at("proportion").get<double>();
      cr.budget = c.at("budget").get<std::size_t>();
      cr.realized_proportion = c.at("realized_proportion").get<double>();
      cr.skipped = c.at("skipped").get<bool>();
      cr.report = ReportFromJson(c.at("report"));
      r.classes.push_back(std::move(cr));
    }
    r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    return r;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

std::filesystem::path IndexFilePath(const std::filesystem::path& report_path) {
  auto p = report_path;
  p.replace_extension(".idx");
  return p;
}

void SaveReport(const SelectionReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write report " + path.string());
  out << ToJson(report).dump(2) << "\n";
  if (!out) throw InputError("failed writing report " + path.string());
  WriteIndexFile(IndexFilePath(path), report.selected_indices);
}

SelectionReport LoadReport(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open report " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return ReportFromJson(doc);
}

}  // namespace otcoreset
