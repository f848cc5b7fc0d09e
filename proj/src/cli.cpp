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

#include "otcoreset/cli.hpp"

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "otcoreset/cost_matrix.hpp"
#include "otcoreset/oracle.hpp"
#include "otcoreset/ot_solver.hpp"
#include "otcoreset/pool_io.hpp"
#include "otcoreset/report.hpp"
#include "otcoreset/selector.hpp"

namespace otcoreset {

namespace {

namespace fs = std::filesystem;

struct PoolArgs {
  std::string train, val, grad, labels, val_labels;
  std::string format;  // empty: infer from extension
};

void AddPoolOptions(CLI::App* cmd, PoolArgs& a, bool labels) {
  cmd->add_option("--train", a.train, "training embeddings (GEMB binary or CSV)")->required();
  cmd->add_option("--val", a.val, "validation embeddings (GEMB binary or CSV)")->required();
  cmd->add_option("--grad", a.grad, "training gradient norms (GNRM binary or CSV)");
  cmd->add_option("--format", a.format, "embedding file format")
      ->check(CLI::IsMember({"binary", "csv"}));
  if (labels) {
    cmd->add_option("--labels", a.labels, "training labels (CSV, one per line)");
    cmd->add_option("--val-labels", a.val_labels, "validation labels (CSV, one per line)");
  }
}

FileFormat FormatFor(const PoolArgs& a, const std::string& path) {
  if (a.format == "binary") return FileFormat::kBinary;
  if (a.format == "csv") return FileFormat::kCsv;
  return FormatFromExtension(path);
}

std::pair<Pool, Pool> LoadPools(const PoolArgs& a) {
  PoolFiles train{a.train, std::nullopt, std::nullopt};
  if (!a.grad.empty()) train.grad_norms = a.grad;
  if (!a.labels.empty()) train.labels = a.labels;
  PoolFiles val{a.val, std::nullopt, std::nullopt};
  if (!a.val_labels.empty()) val.labels = a.val_labels;
  Pool t = LoadPool(train, PoolRole::kTraining, FormatFor(a, a.train));
  Pool v = LoadPool(val, PoolRole::kValidation, FormatFor(a, a.val));
  if (t.dim() != v.dim()) {
    std::ostringstream os;
    os << "training dimension " << t.dim() << " differs from validation dimension " << v.dim();
    throw InputError(os.str());
  }
  return {std::move(t), std::move(v)};
}

Metric MetricFromString(const std::string& s) {
  return s == "manhattan" ? Metric::kManhattan : Metric::kEuclidean;
}

std::string Num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

fs::path SweepReportPath(const fs::path& out, double lambda) {
  fs::path p = out;
  const std::string ext = p.extension().string();
  p.replace_extension();
  p += ".lambda-" + Num(lambda) + (ext.empty() ? ".json" : ext);
  return p;
}

struct SelectArgs {
  PoolArgs pools;
  std::size_t budget = 0;
  double lambda = 0.1;
  std::vector<double> sweep;
  std::size_t k = 10;
  std::size_t t_max = 200;
  std::uint64_t seed = 0;
  bool normalize_grad = false;
  bool labeled = false;
  bool redistribute = false;
  std::string metric = "euclidean";
  std::string out = "selection.json";
};

int CmdSelect(const SelectArgs& a, int threads, std::ostream& out) {
  auto [train, val] = LoadPools(a.pools);
  SelectionConfig config;
  config.budget = a.budget;
  config.lambda = a.lambda;
  config.k = a.k;
  config.t_max = a.t_max;
  config.seed = a.seed;
  config.normalize_grad = a.normalize_grad;
  config.labeled = a.labeled;
  config.redistribute_remainder = a.redistribute;
  config.metric = MetricFromString(a.metric);

  auto run = [&](const SelectionConfig& c) {
    SelectionReport r = c.labeled ? SelectLabeled(c, train, val) : Select(c, train, val);
    r.config_echo["train"] = a.pools.train;
    r.config_echo["val"] = a.pools.val;
    r.config_echo["grad"] = a.pools.grad;
    r.config_echo["labels"] = a.pools.labels;
    r.config_echo["val_labels"] = a.pools.val_labels;
    r.config_echo["threads"] = threads;
    return r;
  };

  if (a.sweep.empty()) {
    const SelectionReport r = run(config);
    SaveReport(r, a.out);
    std::size_t exchanges = r.exchange_log.size();
    for (const ClassReport& c : r.classes) exchanges += c.report.exchange_log.size();
    out << "selected " << r.selected_indices.size() << " of " << train.size() << "\n"
        << "greedy_score " << Num(r.greedy_score) << "\n"
        << "final_score " << Num(r.final_score) << "\n"
        << "exchanges " << exchanges << "\n";
    if (r.classes.empty()) {
      out << "pass_at_1 " << Num(r.refine.pass_at_1) << "\n"
          << "avg_seconds_per_exchange " << Num(r.refine.avg_seconds_per_exchange) << "\n"
          << "termination " << ToString(r.refine.termination) << "\n";
    }
    for (const ClassReport& c : r.classes) {
      out << "class " << c.label << " budget " << c.budget;
      if (c.skipped)
        out << " skipped\n";
      else
        out << " final_score " << Num(c.report.final_score) << " exchanges "
            << c.report.exchange_log.size() << " termination "
            << ToString(c.report.refine.termination) << "\n";
    }
    out << "report " << a.out << "\n"
        << "indices " << IndexFilePath(a.out).string() << "\n";
    for (const std::string& w : r.warnings) out << "warning " << w << "\n";
    return kExitOk;
  }
  out << "lambda,greedy_score,final_score,exchanges,report\n";
  for (double lambda : a.sweep) {
    SelectionConfig c = config;
    c.lambda = lambda;
    const SelectionReport r = run(c);
    const fs::path path = SweepReportPath(a.out, lambda);
    SaveReport(r, path);
    out << Num(lambda) << "," << Num(r.greedy_score) << "," << Num(r.final_score) << ","
        << r.exchange_log.size() << "," << path.string() << "\n";
  }
  return kExitOk;
}

struct ScoreArgs {
  PoolArgs pools;
  std::string subset;
  double lambda = 0.1;
  bool normalize_grad = false;
  std::string metric = "euclidean";
};

int CmdScore(const ScoreArgs& a, std::ostream& out) {
  auto [train, val] = LoadPools(a.pools);
  const IndexList subset = ReadIndexFile(a.subset);
  if (subset.empty()) throw InputError(a.subset + ": empty subset");
  ValidateIndexSet(subset, train.size(), a.subset);
  const DistanceMatrix d = ComputeDistances(train, val, MetricFromString(a.metric));
  std::vector<double> g = train.GradNormsAsDouble();
  if (a.normalize_grad) g = MinMaxNormalize(g);
  if (!(a.lambda >= 0.0)) throw InputError("lambda must be >= 0");
  const PooScoreParts parts = PooScore(d, g, a.lambda, subset);
  out << "poo_score " << Num(parts.score) << "\n"
      << "ot_component " << Num(parts.ot) << "\n"
      << "grad_component " << Num(parts.grad_bonus) << "\n";
  return kExitOk;
}

struct OracleArgs {
  PoolArgs pools;
  std::size_t n = 3;
  double lambda = 0.1;
  std::size_t probes = 100;
  std::size_t subset_size = 5;
  std::size_t trials = 100;
  std::size_t max_size = 64;
  std::uint64_t seed = 0;
};

int CmdBrute(const OracleArgs& a, std::ostream& out) {
  auto [train, val] = LoadPools(a.pools);
  const DistanceMatrix d = ComputeDistances(train, val);
  const PooCostMatrix m = BuildPooMatrix(d, train.GradNormsAsDouble(), a.lambda);
  const oracle::BruteForceResult r = oracle::BruteForceBest(m, a.n);
  out << "subset,score\n";
  for (const auto& row : r.table) {
    for (std::size_t i = 0; i < row.subset.size(); ++i)
      out << (i ? " " : "") << row.subset[i];
    out << "," << Num(row.score) << "\n";
  }
  out << "# best ";
  for (Index i : r.best) out << i << " ";
  out << Num(r.best_score) << "\n";
  return kExitOk;
}

int CmdOt1d(const OracleArgs& a, std::ostream& out) {
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_int_distribution<std::size_t> size(2, std::max<std::size_t>(2, a.max_size));
  out << "trial,size,solver,oracle,abs_diff\n";
  double worst = 0.0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const std::size_t k = size(rng);
    std::vector<double> xs(k), ys(k);
    for (double& x : xs) x = coord(rng);
    for (double& y : ys) y = coord(rng);
    Matrix cost(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) cost(i, j) = std::abs(xs[i] - ys[j]);
    const double solver = SolveOt(cost, Marginals::Uniform(k, k)).objective;
    const double truth = oracle::Ot1d(xs, ys);
    worst = std::max(worst, std::abs(solver - truth));
    out << t << "," << k << "," << Num(solver) << "," << Num(truth) << ","
        << Num(std::abs(solver - truth)) << "\n";
  }
  out << "# max_abs_diff " << Num(worst) << "\n";
  return worst <= 1e-9 ? kExitOk : kExitInvariantFailure;
}

int CmdKr(const OracleArgs& a, std::ostream& out) {
  auto [train, val] = LoadPools(a.pools);
  const DistanceMatrix d = ComputeDistances(train, val);
  const std::size_t s = std::min(a.subset_size, train.size());
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<double> value(-5.0, 5.0);
  out << "probe,ot,mean_gap,kr_gap\n";
  double worst = 0.0;
  for (std::size_t p = 0; p < a.probes; ++p) {
    const IndexList subset = RandomBaseline(rng(), s, train.size());
    const std::size_t n_anchor = 1 + rng() % 4;
    const IndexList anchor_rows = RandomBaseline(rng(), std::min(n_anchor, val.size()), val.size());
    const Pool anchors = val.Subset(anchor_rows);
    std::vector<double> values(anchors.size());
    for (double& v : values) v = value(rng);
    const Pool sub = train.Subset(subset);
    const auto [f_sub, f_val] = oracle::LipschitzProbe(sub, val, anchors, values);
    const double ot = SolveOtOnSubset(d.entries, subset).objective;
    const double gap = KrGap(ot, f_sub, f_val);
    worst = std::min(worst, gap);
    out << p << "," << Num(ot) << "," << Num(ot - gap) << "," << Num(gap) << "\n";
  }
  out << "# min_gap " << Num(worst) << "\n";
  return worst >= -1e-9 ? kExitOk : kExitInvariantFailure;
}

struct GenArgs {
  oracle::SynthOptions synth;
  std::string grad_model = "uniform";
  std::string out_dir = ".";
  std::string prefix = "";
};

int CmdGen(const GenArgs& a, std::ostream& out) {
  oracle::SynthOptions o = a.synth;
  o.grad_model = oracle::GradModelFromString(a.grad_model);
  const auto [train, val] = oracle::SynthPools(o);
  fs::create_directories(a.out_dir);
  const PoolFiles tf = SavePool(train, fs::path(a.out_dir) / (a.prefix + "train.gemb"));
  const PoolFiles vf = SavePool(val, fs::path(a.out_dir) / (a.prefix + "val.gemb"));
  for (const PoolFiles* f : {&tf, &vf}) {
    out << "wrote " << f->embeddings.string() << "\n";
    if (f->grad_norms) out << "wrote " << f->grad_norms->string() << "\n";
    if (f->labels) out << "wrote " << f->labels->string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal-transport coreset selection"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0 = all cores)");

  SelectArgs sel;
  CLI::App* select = app.add_subcommand("select", "select a coreset");
  AddPoolOptions(select, sel.pools, true);
  select->add_option("--budget", sel.budget, "coreset size n")->required();
  select->add_option("--lambda", sel.lambda, "gradient-norm trade-off (>= 0)");
  select->add_option("--lambda-sweep", sel.sweep, "comma-separated lambdas, one run each")
      ->delimiter(',');
  select->add_option("--k", sel.k, "pruning width");
  select->add_option("--t-max", sel.t_max, "maximum exchange iterations");
  select->add_option("--seed", sel.seed, "seed (echoed; selection is deterministic)");
  select->add_flag("--normalize-grad", sel.normalize_grad, "min-max normalize gradient norms");
  select->add_flag("--labeled", sel.labeled, "per-class selection with label budgets");
  select->add_flag("--redistribute-remainder", sel.redistribute,
                   "assign floor remainders by largest fractional part");
  select->add_option("--metric", sel.metric)->check(CLI::IsMember({"euclidean", "manhattan"}));
  select->add_option("--out", sel.out, "report path; indices go to <out>.idx");

  ScoreArgs sc;
  CLI::App* score = app.add_subcommand("score", "score a subset");
  AddPoolOptions(score, sc.pools, false);
  score->add_option("--subset", sc.subset, "newline-separated index file")->required();
  score->add_option("--lambda", sc.lambda, "gradient-norm trade-off (>= 0)");
  score->add_flag("--normalize-grad", sc.normalize_grad, "min-max normalize gradient norms");
  score->add_option("--metric", sc.metric)->check(CLI::IsMember({"euclidean", "manhattan"}));

  OracleArgs ora;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "brute-force and analytic checks");
  oracle_cmd->require_subcommand(1);
  CLI::App* brute = oracle_cmd->add_subcommand("brute", "score every subset of size n");
  AddPoolOptions(brute, ora.pools, false);
  brute->add_option("--n", ora.n, "subset size");
  brute->add_option("--lambda", ora.lambda, "gradient-norm trade-off (>= 0)");
  CLI::App* ot1d = oracle_cmd->add_subcommand("ot1d", "solver vs sorted matching on a line");
  ot1d->add_option("--trials", ora.trials);
  ot1d->add_option("--max-size", ora.max_size);
  ot1d->add_option("--seed", ora.seed);
  CLI::App* kr = oracle_cmd->add_subcommand("kr", "Lipschitz probes of the OT bound");
  AddPoolOptions(kr, ora.pools, false);
  kr->add_option("--probes", ora.probes);
  kr->add_option("--subset-size", ora.subset_size);
  kr->add_option("--seed", ora.seed);

  GenArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen", "write synthetic pools");
  gen_cmd->add_option("--seed", gen.synth.seed);
  gen_cmd->add_option("--n-train", gen.synth.n_train);
  gen_cmd->add_option("--n-val", gen.synth.n_val);
  gen_cmd->add_option("--dim", gen.synth.dim);
  gen_cmd->add_option("--clusters", gen.synth.n_clusters);
  gen_cmd->add_option("--spread", gen.synth.center_spread);
  gen_cmd->add_option("--std", gen.synth.cluster_std);
  gen_cmd->add_option("--val-shift", gen.synth.val_shift);
  gen_cmd->add_option("--grad-model", gen.grad_model)
      ->check(CLI::IsMember({"constant", "uniform", "lognormal"}));
  gen_cmd->add_option("--grad-scale", gen.synth.grad_scale);
  gen_cmd->add_flag("--grad-correlated", gen.synth.grad_distance_correlated);
  gen_cmd->add_option("--labels", gen.synth.n_labels, "number of classes (0 = unlabeled)");
  gen_cmd->add_option("--out-dir", gen.out_dir);
  gen_cmd->add_option("--prefix", gen.prefix);

  std::vector<const char*> argv;
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUserError;
  }

  if (threads > 0) omp_set_num_threads(threads);
  try {
    if (select->parsed()) return CmdSelect(sel, threads, out);
    if (score->parsed()) return CmdScore(sc, out);
    if (brute->parsed()) return CmdBrute(ora, out);
    if (ot1d->parsed()) return CmdOt1d(ora, out);
    if (kr->parsed()) return CmdKr(ora, out);
    if (gen_cmd->parsed()) return CmdGen(gen, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  } catch (const InvariantError& e) {
    err << "internal invariant violated: " << e.what() << "\n";
    return kExitInvariantFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUserError;
  }
  return kExitUserError;
}

}  // namespace otcoreset
