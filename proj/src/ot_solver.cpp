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

#include "otcoreset/ot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <type_traits>

namespace otcoreset {

Marginals Marginals::FromMasses(std::vector<double> p, std::vector<double> q) {
  auto normalize = [](std::vector<double>& v, const char* name) {
    if (v.empty()) throw InputError(std::string("marginal ") + name + " is empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i]) || v[i] < 0.0) {
        std::ostringstream os;
        os << "marginal " << name << "[" << i << "] = " << v[i]
           << " is not a finite nonnegative mass";
        throw InputError(os.str());
      }
      sum += v[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      std::ostringstream os;
      os.precision(17);
      os << "marginal " << name << " sums to " << sum << ", expected 1";
      throw InputError(os.str());
    }
    for (double& x : v) x /= sum;
  };
  normalize(p, "p");
  normalize(q, "q");
  Marginals m;
  m.p_ = std::move(p);
  m.q_ = std::move(q);
  return m;
}

Marginals Marginals::FromCounts(std::vector<std::int64_t> row_counts,
                                std::vector<std::int64_t> col_counts) {
  auto masses = [](const std::vector<std::int64_t>& c, const char* name) {
    if (c.empty()) throw InputError(std::string("marginal ") + name + " is empty");
    std::int64_t total = 0;
    for (std::int64_t x : c) {
      if (x < 0) throw InputError(std::string("negative count in ") + name);
      total += x;
    }
    if (total == 0) throw InputError(std::string("marginal ") + name + " has no mass");
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      out[i] = static_cast<double>(c[i]) / static_cast<double>(total);
    return std::pair{std::move(out), total};
  };
  auto [p, row_total] = masses(row_counts, "p");
  auto [q, col_total] = masses(col_counts, "q");
  if (static_cast<long double>(row_total) * col_total >
      static_cast<long double>(std::numeric_limits<std::int64_t>::max() / 4)) {
    throw InputError("marginal counts too large for exact integer flows");
  }
  Marginals m;
  m.p_ = std::move(p);
  m.q_ = std::move(q);
  m.row_counts_ = std::move(row_counts);
  m.col_counts_ = std::move(col_counts);
  return m;
}

Marginals Marginals::Uniform(std::size_t rows, std::size_t cols) {
  return FromCounts(std::vector<std::int64_t>(rows, 1),
                    std::vector<std::int64_t>(cols, 1));
}

namespace {

// Primal network simplex on the complete bipartite graph rows -> cols, with an
// artificial root connected to every node. Node ids: rows [0, m), cols
// [m, m + n), root m + n. Real arc a = i * n + j; artificial arc of node u is
// m * n + u. Potentials follow the convention that the reduced cost of arc
// (s, t) is c + pi[s] - pi[t].
template <typename Flow>
class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost, std::vector<Flow> supply)
      : cost_(cost),
        m_(cost.rows()),
        n_(cost.cols()),
        nodes_(m_ + n_),
        root_(m_ + n_),
        real_arcs_(m_ * n_),
        supply_(std::move(supply)) {
    double max_abs = 0.0, max_cost = -std::numeric_limits<double>::infinity();
    for (double c : cost.data()) {
      max_abs = std::max(max_abs, std::abs(c));
      max_cost = std::max(max_cost, c);
    }
    scale_ = std::max(1.0, max_abs);
    // Any supply -> root -> demand path must cost more than a direct arc.
    art_cost_ = max_cost + scale_;
    eps_ = 1e-11 * scale_;
    block_size_ = std::max<std::size_t>(
        10, static_cast<std::size_t>(std::ceil(std::sqrt(double(real_arcs_)))));
    Init();
  }

  void Run() {
    std::size_t entering;
    while (FindEnteringArc(entering)) {
      Pivot(entering);
      ++pivots_;
    }
  }

  std::size_t pivots() const { return pivots_; }

  Flow artificial_flow(std::size_t u) const { return flow_[real_arcs_ + u]; }
  Flow flow(std::size_t i, std::size_t j) const { return flow_[i * n_ + j]; }
  bool in_tree(std::size_t i, std::size_t j) const {
    return in_tree_[i * n_ + j] != 0;
  }
  double potential(std::size_t u) const { return pi_[u]; }

  // Positive-flow real arcs, by construction a subset of the tree arcs.
  template <typename Fn>
  void ForEachTreeFlow(Fn&& fn) const {
    for (std::size_t u = 0; u < nodes_; ++u) {
      const std::size_t a = pred_[u];
      if (a < real_arcs_ && flow_[a] > Flow(0)) fn(a / n_, a % n_, flow_[a]);
    }
  }

 private:
  std::size_t Source(std::size_t a) const {
    if (a < real_arcs_) return a / n_;
    const std::size_t u = a - real_arcs_;
    return art_up_[u] ? u : root_;
  }
  std::size_t Target(std::size_t a) const {
    if (a < real_arcs_) return m_ + a % n_;
    const std::size_t u = a - real_arcs_;
    return art_up_[u] ? root_ : u;
  }
  double Cost(std::size_t a) const {
    if (a < real_arcs_) return cost_.data()[a];
    return art_up_[a - real_arcs_] ? 0.0 : art_cost_;
  }

  static constexpr Flow kInfinite() {
    if constexpr (std::is_floating_point_v<Flow>)
      return std::numeric_limits<Flow>::infinity();
    else
      return std::numeric_limits<Flow>::max();
  }

  void Init() {
    const std::size_t total_arcs = real_arcs_ + nodes_;
    flow_.assign(total_arcs, Flow(0));
    in_tree_.assign(total_arcs, 0);
    art_up_.assign(nodes_, 0);
    parent_.assign(nodes_ + 1, 0);
    pred_.assign(nodes_ + 1, total_arcs);
    forward_.assign(nodes_ + 1, 0);
    depth_.assign(nodes_ + 1, 0);
    pi_.assign(nodes_ + 1, 0.0);
    adj_.assign(nodes_ + 1, {});
    adj_[root_].reserve(nodes_);
    parent_[root_] = root_;
    // Zero-flow artificial arcs point toward the root, which makes the
    // initial tree strongly feasible.
    for (std::size_t u = 0; u < nodes_; ++u) {
      const std::size_t a = real_arcs_ + u;
      in_tree_[a] = 1;
      parent_[u] = root_;
      pred_[u] = a;
      depth_[u] = 1;
      adj_[u].push_back(a);
      adj_[root_].push_back(a);
      if (supply_[u] >= Flow(0)) {
        art_up_[u] = 1;
        forward_[u] = 1;
        flow_[a] = supply_[u];
        pi_[u] = 0.0;
      } else {
        art_up_[u] = 0;
        forward_[u] = 0;
        flow_[a] = -supply_[u];
        pi_[u] = art_cost_;
      }
    }
  }

  // Block search: scan arcs cyclically from where the previous search
  // stopped; within a block keep the first most negative reduced cost.
  bool FindEnteringArc(std::size_t& entering) {
    if (real_arcs_ == 0) return false;
    double best = -eps_;
    bool found = false;
    std::size_t count = block_size_;
    std::size_t a = next_arc_;
    for (std::size_t scanned = 0; scanned < real_arcs_; ++scanned) {
      if (!in_tree_[a]) {
        const std::size_t i = a / n_, j = a % n_;
        const double rc = cost_.data()[a] + pi_[i] - pi_[m_ + j];
        if (rc < best) {
          best = rc;
          entering = a;
          found = true;
        }
      }
      if (++a == real_arcs_) a = 0;
      if (--count == 0) {
        if (found) break;
        count = block_size_;
      }
    }
    next_arc_ = a;
    return found;
  }

  void Pivot(std::size_t in_arc) {
    const std::size_t first = Source(in_arc);
    const std::size_t second = Target(in_arc);

    std::size_t u = first, v = second;
    while (u != v) {
      if (depth_[u] > depth_[v]) {
        u = parent_[u];
      } else if (depth_[v] > depth_[u]) {
        v = parent_[v];
      } else {
        u = parent_[u];
        v = parent_[v];
      }
    }
    const std::size_t join = u;

    // Leaving arc: the last blocking arc met when walking the cycle from the
    // join in the direction of the flow push. This keeps the tree strongly
    // feasible.
    Flow delta = kInfinite();
    int result = 0;
    std::size_t u_out = root_;
    for (std::size_t w = first; w != join; w = parent_[w]) {
      if (forward_[w]) {
        const Flow d = flow_[pred_[w]];
        if (d < delta) {
          delta = d;
          u_out = w;
          result = 1;
        }
      }
    }
    for (std::size_t w = second; w != join; w = parent_[w]) {
      if (!forward_[w]) {
        const Flow d = flow_[pred_[w]];
        if (d <= delta) {
          delta = d;
          u_out = w;
          result = 2;
        }
      }
    }
    if (result == 0) throw InvariantError("transport simplex: unbounded cycle");

    if (delta > Flow(0)) {
      flow_[in_arc] += delta;
      for (std::size_t w = first; w != join; w = parent_[w]) {
        if (forward_[w])
          flow_[pred_[w]] -= delta;
        else
          flow_[pred_[w]] += delta;
      }
      for (std::size_t w = second; w != join; w = parent_[w]) {
        if (forward_[w])
          flow_[pred_[w]] += delta;
        else
          flow_[pred_[w]] -= delta;
      }
    }

    const std::size_t out_arc = pred_[u_out];
    const std::size_t out_parent = parent_[u_out];
    in_tree_[out_arc] = 0;
    EraseArc(adj_[u_out], out_arc);
    EraseArc(adj_[out_parent], out_arc);
    in_tree_[in_arc] = 1;
    adj_[first].push_back(in_arc);
    adj_[second].push_back(in_arc);

    const std::size_t u_in = result == 1 ? first : second;
    const std::size_t v_in = result == 1 ? second : first;
    Hang(u_in, v_in, in_arc);
  }

  static void EraseArc(std::vector<std::size_t>& list, std::size_t arc) {
    auto it = std::find(list.begin(), list.end(), arc);
    *it = list.back();
    list.pop_back();
  }

  // Re-roots the subtree containing `node` below `new_parent` via `arc` and
  // refreshes parent/pred/depth/potential for every node in it.
  void Hang(std::size_t node, std::size_t new_parent, std::size_t arc) {
    SetParent(node, new_parent, arc);
    stack_.clear();
    stack_.push_back(node);
    while (!stack_.empty()) {
      const std::size_t x = stack_.back();
      stack_.pop_back();
      for (std::size_t b : adj_[x]) {
        if (b == pred_[x]) continue;
        const std::size_t s = Source(b);
        const std::size_t y = s == x ? Target(b) : s;
        SetParent(y, x, b);
        stack_.push_back(y);
      }
    }
  }

  void SetParent(std::size_t node, std::size_t parent, std::size_t arc) {
    parent_[node] = parent;
    pred_[node] = arc;
    forward_[node] = Source(arc) == node;
    depth_[node] = depth_[parent] + 1;
    pi_[node] = forward_[node] ? pi_[parent] - Cost(arc) : pi_[parent] + Cost(arc);
  }

  const Matrix& cost_;
  std::size_t m_, n_, nodes_, root_, real_arcs_;
  std::vector<Flow> supply_;
  double scale_ = 1.0, art_cost_ = 1.0, eps_ = 0.0;
  std::size_t block_size_ = 10;
  std::size_t next_arc_ = 0;
  std::size_t pivots_ = 0;

  std::vector<Flow> flow_;
  std::vector<char> in_tree_;
  std::vector<char> art_up_;
  std::vector<std::size_t> parent_, pred_, depth_;
  std::vector<char> forward_;
  std::vector<double> pi_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> stack_;
};

void ValidateCost(const Matrix& cost, const Marginals& marginals) {
  if (cost.rows() == 0 || cost.cols() == 0)
    throw InputError("transport problem has an empty support");
  if (cost.rows() != marginals.p().size() || cost.cols() != marginals.q().size()) {
    std::ostringstream os;
    os << "cost is " << cost.rows() << "x" << cost.cols() << " but marginals are "
       << marginals.p().size() << " and " << marginals.q().size();
    throw InputError(os.str());
  }
  for (std::size_t i = 0; i < cost.rows(); ++i)
    for (std::size_t j = 0; j < cost.cols(); ++j)
      if (!std::isfinite(cost(i, j))) {
        std::ostringstream os;
        os << "cost(" << i << ", " << j << ") is not finite";
        throw InputError(os.str());
      }
}

template <typename Flow>
TransportSolution Extract(const TransportSimplex<Flow>& simplex,
                          const Matrix& cost, const Marginals& marginals,
                          double flow_scale) {
  const std::size_t m = cost.rows(), n = cost.cols();
  for (std::size_t u = 0; u < m + n; ++u) {
    const double art = static_cast<double>(simplex.artificial_flow(u)) / flow_scale;
    if (art > 1e-12) {
      std::ostringstream os;
      os << "transport simplex left mass " << art << " on artificial arc " << u;
      throw InvariantError(os.str());
    }
  }
  TransportSolution sol;
  sol.pivots = simplex.pivots();
  double objective = 0.0;
  simplex.ForEachTreeFlow([&](std::size_t i, std::size_t j, Flow f) {
    sol.plan.push_back({i, j, static_cast<double>(f) / flow_scale});
  });
  std::sort(sol.plan.begin(), sol.plan.end(), [](const PlanEntry& a, const PlanEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  if constexpr (std::is_integral_v<Flow>) {
    // Exact integer flows: accumulate c * flow, divide once.
    long double acc = 0.0L;
    for (const PlanEntry& e : sol.plan)
      acc += static_cast<long double>(cost(e.row, e.col)) *
             static_cast<long double>(simplex.flow(e.row, e.col));
    objective = static_cast<double>(acc / static_cast<long double>(flow_scale));
  } else {
    for (const PlanEntry& e : sol.plan) objective += cost(e.row, e.col) * e.mass;
  }
  sol.objective = objective;

  sol.dual_u.resize(m);
  sol.dual_v.resize(n);
  for (std::size_t i = 0; i < m; ++i) sol.dual_u[i] = -simplex.potential(i);
  for (std::size_t j = 0; j < n; ++j) sol.dual_v[j] = simplex.potential(m + j);

  const auto p = marginals.p();
  double shift = 0.0;
  std::size_t support = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (p[i] > 0.0) {
      shift += sol.dual_u[i];
      ++support;
    }
  shift /= static_cast<double>(support);
  for (double& u : sol.dual_u) u -= shift;
  for (double& v : sol.dual_v) v += shift;
  for (std::size_t i = 0; i < m; ++i) {
    if (p[i] > 0.0) continue;
    double tight = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) tight = std::min(tight, cost(i, j) - sol.dual_v[j]);
    sol.dual_u[i] = tight;
  }
  return sol;
}

}  // namespace

TransportSolution SolveOt(const Matrix& cost, const Marginals& marginals,
                          const SolverOptions& options) {
  ValidateCost(cost, marginals);
  const std::size_t m = cost.rows(), n = cost.cols();
  TransportSolution sol;
  if (marginals.integral()) {
    const auto rc = marginals.row_counts();
    const auto cc = marginals.col_counts();
    const std::int64_t row_total = std::accumulate(rc.begin(), rc.end(), std::int64_t{0});
    const std::int64_t col_total = std::accumulate(cc.begin(), cc.end(), std::int64_t{0});
    std::vector<std::int64_t> supply(m + n);
    for (std::size_t i = 0; i < m; ++i) supply[i] = rc[i] * col_total;
    for (std::size_t j = 0; j < n; ++j) supply[m + j] = -cc[j] * row_total;
    TransportSimplex<std::int64_t> simplex(cost, std::move(supply));
    simplex.Run();
    sol = Extract(simplex, cost, marginals,
                  static_cast<double>(row_total) * static_cast<double>(col_total));
  } else {
    std::vector<double> supply(m + n);
    for (std::size_t i = 0; i < m; ++i) supply[i] = marginals.p()[i];
    for (std::size_t j = 0; j < n; ++j) supply[m + j] = -marginals.q()[j];
    TransportSimplex<double> simplex(cost, std::move(supply));
    simplex.Run();
    sol = Extract(simplex, cost, marginals, 1.0);
  }
  if (options.verify) {
    const CertificateReport cert = CheckCertificate(cost, marginals, sol);
    if (!cert.ok) {
      std::ostringstream os;
      os << "OT certificate failed: row violation " << cert.max_row_violation
         << ", column violation " << cert.max_col_violation << ", dual violation "
         << cert.max_dual_violation << ", duality gap " << cert.duality_gap
         << ", support " << cert.support;
      throw InvariantError(os.str());
    }
  }
  return sol;
}

TransportSolution SolveOtOnSubset(const Matrix& m, std::span<const Index> set,
                                  const SolverOptions& options) {
  if (set.empty()) throw InputError("subset OT requires a non-empty set");
  ValidateIndexSet(set, m.rows(), "subset");
  const Matrix sub = m.SelectRows(set);
  return SolveOt(sub, Marginals::Uniform(set.size(), m.cols()), options);
}

TransportSolution SolveOtOnSubset(const PooCostMatrix& m, std::span<const Index> set,
                                  const SolverOptions& options) {
  return SolveOtOnSubset(m.entries, set, options);
}

CertificateReport CheckCertificate(const Matrix& cost, const Marginals& marginals,
                                   const TransportSolution& sol) {
  CertificateReport r;
  const std::size_t m = cost.rows(), n = cost.cols();
  const auto p = marginals.p();
  const auto q = marginals.q();
  std::vector<double> row_sum(m, 0.0), col_sum(n, 0.0);
  r.min_plan_mass = sol.plan.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const PlanEntry& e : sol.plan) {
    row_sum[e.row] += e.mass;
    col_sum[e.col] += e.mass;
    r.min_plan_mass = std::min(r.min_plan_mass, e.mass);
  }
  for (std::size_t i = 0; i < m; ++i)
    r.max_row_violation = std::max(r.max_row_violation, std::abs(row_sum[i] - p[i]));
  for (std::size_t j = 0; j < n; ++j)
    r.max_col_violation = std::max(r.max_col_violation, std::abs(col_sum[j] - q[j]));
  double dual_value = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    dual_value += p[i] * sol.dual_u[i];
    for (std::size_t j = 0; j < n; ++j)
      r.max_dual_violation =
          std::max(r.max_dual_violation, sol.dual_u[i] + sol.dual_v[j] - cost(i, j));
  }
  for (std::size_t j = 0; j < n; ++j) dual_value += q[j] * sol.dual_v[j];
  r.duality_gap = std::abs(sol.objective - dual_value);
  r.support = sol.plan.size();
  r.ok = r.max_row_violation <= 1e-9 && r.max_col_violation <= 1e-9 &&
         r.min_plan_mass >= -1e-9 && r.max_dual_violation <= 1e-9 &&
         r.duality_gap <= 1e-9 * (1.0 + std::abs(sol.objective)) &&
         r.support <= m + n - 1;
  return r;
}

double KrGap(double ot_value, std::span<const double> f_subset,
             std::span<const double> f_val) {
  auto mean = [](std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  return ot_value - std::abs(mean(f_subset) - mean(f_val));
}

}  // namespace otcoreset
