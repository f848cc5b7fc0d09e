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

#include "otcoreset/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>

#include "otcoreset/ot_solver.hpp"

namespace otcoreset::oracle {

std::uint64_t Binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    acc = acc * (n - k + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

BruteForceResult BruteForceBest(const PooCostMatrix& m, std::size_t n) {
  if (n < 1 || n > m.rows()) throw InputError("brute force budget out of range");
  const std::uint64_t count = Binomial(m.rows(), n);
  if (count > kMaxBruteForceSubsets) {
    std::ostringstream os;
    os << "brute force over C(" << m.rows() << ", " << n << ") = " << count
       << " subsets exceeds the guard of " << kMaxBruteForceSubsets;
    throw InputError(os.str());
  }
  BruteForceResult result;
  result.table.reserve(count);
  IndexList combo(n);
  for (std::size_t i = 0; i < n; ++i) combo[i] = static_cast<Index>(i);
  const auto rows = static_cast<Index>(m.rows());
  while (true) {
    result.table.push_back({combo, 0.0});
    std::size_t i = n;
    while (i > 0 && combo[i - 1] == rows - static_cast<Index>(n - i + 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < n; ++j) combo[j] = combo[j - 1] + 1;
  }
  const auto total = static_cast<std::int64_t>(result.table.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t t = 0; t < total; ++t) {
    try {
      result.table[t].score = SolveOtOnSubset(m, result.table[t].subset).objective;
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::size_t best = 0;
  for (std::size_t t = 1; t < result.table.size(); ++t)
    if (result.table[t].score < result.table[best].score) best = t;
  result.best = result.table[best].subset;
  result.best_score = result.table[best].score;
  return result;
}

double PercentileOf(const BruteForceResult& result, double score) {
  std::size_t below = 0;
  for (const ScoredSubset& s : result.table)
    if (s.score < score) ++below;
  return static_cast<double>(below) / static_cast<double>(result.table.size());
}

double Ot1d(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size()) throw InputError("1-D OT oracle needs equal sample counts");
  if (xs.empty()) throw InputError("1-D OT oracle needs samples");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += std::abs(xs[i] - ys[i]);
  return acc / static_cast<double>(xs.size());
}

std::pair<std::vector<double>, std::vector<double>> LipschitzProbe(
    const Pool& a, const Pool& b, const Pool& anchors, std::span<const double> values,
    Metric metric) {
  if (anchors.size() == 0) throw InputError("Lipschitz probe needs at least one anchor");
  if (values.size() != anchors.size())
    throw InputError("one value per anchor is required");
  if (a.dim() != anchors.dim() || b.dim() != anchors.dim())
    throw InputError("anchor dimension does not match the pools");
  auto eval = [&](const Pool& pool) {
    std::vector<double> f(pool.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t k = 0; k < anchors.size(); ++k)
        f[i] = std::min(f[i], values[k] + Distance(pool.embedding(i), anchors.embedding(k), metric));
    return f;
  };
  return {eval(a), eval(b)};
}

GradModel GradModelFromString(const std::string& name) {
  if (name == "constant") return GradModel::kConstant;
  if (name == "uniform") return GradModel::kUniform;
  if (name == "lognormal") return GradModel::kLognormal;
  throw InputError("unknown gradient model '" + name + "'");
}

std::pair<Pool, Pool> SynthPools(const SynthOptions& o) {
  if (o.n_train < 1 || o.n_val < 1 || o.dim < 1 || o.n_clusters < 1)
    throw InputError("synthetic pool sizes must be at least 1");
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto gaussian = [&](double stddev) { return stddev > 0.0 ? stddev * unit(rng) : 0.0; };

  std::vector<double> centers(o.n_clusters * o.dim);
  for (double& c : centers) c = gaussian(o.center_spread);
  std::vector<double> direction(o.dim);
  double norm = 0.0;
  for (double& d : direction) {
    d = unit(rng);
    norm += d * d;
  }
  norm = std::sqrt(norm);
  for (double& d : direction) d /= norm > 0.0 ? norm : 1.0;

  std::uniform_int_distribution<std::size_t> pick_cluster(0, o.n_clusters - 1);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double radius = o.cluster_std * std::sqrt(static_cast<double>(o.dim));

  auto make = [&](std::size_t count, bool is_val) {
    std::vector<float> emb(count * o.dim);
    std::vector<float> grads(count, 0.0f);
    std::vector<std::int64_t> labels(count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t c = pick_cluster(rng);
      double dist2 = 0.0;
      for (std::size_t k = 0; k < o.dim; ++k) {
        const double noise = gaussian(o.cluster_std);
        dist2 += noise * noise;
        double x = centers[c * o.dim + k] + noise;
        if (is_val) x += o.val_shift * direction[k];
        emb[i * o.dim + k] = static_cast<float>(x);
      }
      labels[i] = o.n_labels == 0 ? 0 : static_cast<std::int64_t>(c % o.n_labels);
      if (is_val) continue;
      double g = o.grad_scale;
      switch (o.grad_model) {
        case GradModel::kConstant: break;
        case GradModel::kUniform: g *= uniform(rng); break;
        case GradModel::kLognormal: g *= std::exp(0.75 * unit(rng)); break;
      }
      if (o.grad_distance_correlated && radius > 0.0) g *= 1.0 + std::sqrt(dist2) / radius;
      grads[i] = static_cast<float>(g);
    }
    std::optional<std::vector<std::int64_t>> lab;
    if (o.n_labels > 0) lab = std::move(labels);
    return Pool(is_val ? PoolRole::kValidation : PoolRole::kTraining, o.dim, std::move(emb),
                std::move(grads), std::move(lab));
  };
  Pool train = make(o.n_train, false);
  Pool val = make(o.n_val, true);
  return {std::move(train), std::move(val)};
}

}  // namespace otcoreset::oracle
