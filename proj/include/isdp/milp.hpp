#pragma once

// Bounded mixed-integer linear programming by LP-relaxation branch and bound
// with a lazy-constraint callback at integer-feasible nodes. Maximization
// sense. Deterministic: best-bound node selection with depth-first plunging,
// most-fractional branching, ties to the lowest index.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "isdp/conic.hpp"
#include "isdp/simplex.hpp"

namespace isdp {

struct MilpColumn {
  double lo = 0.0;
  double hi = 1.0;
  double objective = 0.0;  // maximized
  bool integer = false;
};

struct MilpProblem {
  std::vector<MilpColumn> cols;
  std::vector<LinearRow> rows;
  // set when every feasible point has an integral objective value; enables
  // bound rounding during fathoming
  bool objective_is_integral = false;

  int num_cols() const { return static_cast<int>(cols.size()); }

  int add_column(double lo, double hi, double objective, bool integer) {
    cols.push_back({lo, hi, objective, integer});
    return num_cols() - 1;
  }

  void add_row(LinearRow row) { rows.push_back(std::move(row)); }

  void validate() const {
    for (const auto& c : cols)
      if (!std::isfinite(c.lo) || !std::isfinite(c.hi) || c.lo > c.hi)
        throw std::invalid_argument("MilpProblem: columns need finite ordered bounds");
    for (const auto& r : rows) {
      if (r.coeffs.empty())
        throw std::invalid_argument("MilpProblem: empty row coefficient vector");
      for (auto [j, v] : r.coeffs)
        if (j < 0 || j >= num_cols())
          throw std::invalid_argument("MilpProblem: row references unknown column");
    }
  }
};

constexpr double kIntegralityTol = 1e-6;
constexpr double kCutViolationTol = 1e-6;

struct SimplexSolution {
  enum class Status { kOptimal, kInfeasible, kUnbounded };
  Status status = Status::kInfeasible;
  std::vector<double> x;
  double value = 0.0;
  long iterations = 0;
};

namespace detail {

inline void fill_lp(lp::LpSolver& lp, const MilpProblem& p) {
  std::vector<std::vector<std::pair<int, double>>> cols(p.num_cols());
  for (size_t r = 0; r < p.rows.size(); ++r)
    for (auto [j, v] : p.rows[r].coeffs) cols[j].emplace_back(static_cast<int>(r), v);
  for (int j = 0; j < p.num_cols(); ++j) {
    lp.load_column(j, cols[j]);
    lp.set_cost(j, -p.cols[j].objective);  // internal min form
    lp.set_var_bounds(j, p.cols[j].lo, p.cols[j].hi);
  }
  for (const auto& r : p.rows) lp.add_row({}, r.sense, r.rhs);
}

}  // namespace detail

/// LP relaxation of p (integrality dropped), solved fresh by the primal simplex.
inline SimplexSolution simplex_solve(const MilpProblem& p) {
  p.validate();
  lp::LpSolver lp(p.num_cols());
  detail::fill_lp(lp, p);
  const lp::LpInfo info = lp.solve_primal();
  SimplexSolution out;
  out.iterations = info.iterations;
  switch (info.status) {
    case lp::LpStatus::kOptimal: {
      out.status = SimplexSolution::Status::kOptimal;
      out.x.resize(p.num_cols());
      for (int j = 0; j < p.num_cols(); ++j) out.x[j] = lp.col_value(j);
      out.value = 0.0;
      for (int j = 0; j < p.num_cols(); ++j) out.value += p.cols[j].objective * out.x[j];
      break;
    }
    case lp::LpStatus::kInfeasible:
      out.status = SimplexSolution::Status::kInfeasible;
      break;
    case lp::LpStatus::kUnbounded:
      out.status = SimplexSolution::Status::kUnbounded;
      break;
    default:
      throw std::runtime_error("simplex_solve: solver returned no definite status");
  }
  return out;
}

/// Lazy-constraint callback: called at integer-feasible points; returns violated
/// cuts, or an empty list to accept the point as incumbent.
using LazyCallback = std::function<std::vector<LinearCut>(const std::vector<double>&)>;

struct SolveLimits {
  double time_limit_sec = kInfinity;
  long node_limit = std::numeric_limits<long>::max();
};

struct SolveStats {
  long node_count = 0;
  long cuts_added = 0;
  long lp_iterations = 0;
  double wall_time_sec = 0.0;
  std::vector<std::pair<long, double>> incumbent_trace;  // (node, objective)
};

struct BcSolveResult {
  enum class Status { kOptimal, kInfeasible, kLimit };
  Status status = Status::kInfeasible;
  std::vector<double> x;
  double value = -kInfinity;
  double bound = kInfinity;  // best remaining upper bound at exit
  SolveStats stats;
  std::vector<LinearCut> cuts;  // all cuts appended via the callback
};

inline BcSolveResult branch_and_cut(const MilpProblem& p, const LazyCallback& cb = nullptr,
                                    const SolveLimits& limits = {}) {
  p.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  lp::LpSolver lp(p.num_cols());
  detail::fill_lp(lp, p);
  BcSolveResult res;

  struct Node {
    int parent = -1;
    int branch_col = -1;
    double lo = 0.0, hi = 0.0;
    double bound = kInfinity;  // inherited LP value of the parent (max sense)
  };
  std::vector<Node> nodes;
  nodes.push_back({});  // root

  struct HeapEntry {
    double bound;
    long seq;
    int id;
  };
  auto heap_less = [](const HeapEntry& a, const HeapEntry& b) {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.seq > b.seq;  // FIFO among equal bounds
  };
  std::vector<HeapEntry> heap;
  long seq_counter = 0;

  std::vector<int> applied_cols;  // columns whose LP bounds differ from the root
  auto apply_node = [&](int id) {
    for (int j : applied_cols) lp.set_var_bounds(j, p.cols[j].lo, p.cols[j].hi);
    applied_cols.clear();
    std::vector<int> chain;
    for (int at = id; at > 0; at = nodes[at].parent) chain.push_back(at);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      const Node& nd = nodes[*it];
      lp.set_var_bounds(nd.branch_col, nd.lo, nd.hi);
      applied_cols.push_back(nd.branch_col);
    }
  };

  bool have_incumbent = false;
  double best_value = -kInfinity;
  std::vector<double> best_x;
  auto keep_threshold = [&]() {
    if (!have_incumbent) return -kInfinity;
    return p.objective_is_integral ? best_value + 1.0 - kIntegralityTol
                                   : best_value + 1e-9;
  };

  bool limit_hit = false;
  bool root_processed = false;

  while (!limit_hit) {
    int id = -1;
    if (!root_processed) {
      id = 0;
      root_processed = true;
    } else {
      while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), heap_less);
        const HeapEntry e = heap.back();
        heap.pop_back();
        if (e.bound > keep_threshold()) {
          id = e.id;
          break;
        }
      }
      if (id < 0) break;  // tree exhausted
    }

    apply_node(id);

    // process node `id`, plunging depth-first into preferred children in place
    bool plunging = true;
    while (plunging) {
      if (res.stats.node_count >= limits.node_limit ||
          elapsed() > limits.time_limit_sec) {
        limit_hit = true;
        heap.push_back({nodes[id].bound, seq_counter++, id});
        std::push_heap(heap.begin(), heap.end(), heap_less);
        break;
      }
      ++res.stats.node_count;

      bool fathomed = false;
      while (true) {
        lp.set_cutoff(-keep_threshold());  // internal min form
        const lp::LpInfo info = lp.has_basis() ? lp.solve_dual() : lp.solve_primal();
        res.stats.lp_iterations += info.iterations;
        if (info.status == lp::LpStatus::kInfeasible ||
            info.status == lp::LpStatus::kCutoff) {
          fathomed = true;
          break;
        }
        if (info.status == lp::LpStatus::kUnbounded)
          throw std::runtime_error("branch_and_cut: LP relaxation unbounded");

        const double node_value = -info.objective;
        nodes[id].bound = std::min(nodes[id].bound, node_value);
        if (node_value <= keep_threshold()) {
          fathomed = true;
          break;
        }

        int frac_col = -1;
        double best_dist = kIntegralityTol;
        for (int j = 0; j < p.num_cols(); ++j) {
          if (!p.cols[j].integer) continue;
          const double v = lp.col_value(j);
          const double f = v - std::floor(v);
          const double dist = std::min(f, 1.0 - f);
          if (dist > best_dist + 1e-12) {
            best_dist = dist;
            frac_col = j;
          }
        }
        if (frac_col >= 0) break;  // fractional: branch below

        // integer point: snap and consult the callback
        std::vector<double> xhat(p.num_cols());
        for (int j = 0; j < p.num_cols(); ++j) {
          xhat[j] = lp.col_value(j);
          if (p.cols[j].integer) xhat[j] = std::round(xhat[j]);
        }
        std::vector<LinearCut> cuts = cb ? cb(xhat) : std::vector<LinearCut>{};
        if (!cuts.empty()) {
          for (const LinearCut& cut : cuts) {
            const double viol = cut.violation_at(xhat);
            if (!(viol > kCutViolationTol)) {
              std::ostringstream oss;
              oss << "branch_and_cut: callback returned a cut not violated by the "
                     "queried point (violation "
                  << viol << ", rhs " << cut.rhs << ", " << cut.terms.size()
                  << " terms, node " << res.stats.node_count << ")";
              throw std::runtime_error(oss.str());
            }
            lp.add_row(cut.terms, RowSense::kLe, cut.rhs);
            res.cuts.push_back(cut);
            ++res.stats.cuts_added;
          }
          continue;  // re-solve this node with the new rows
        }

        double val = 0.0;
        for (int j = 0; j < p.num_cols(); ++j) val += p.cols[j].objective * xhat[j];
        if (p.objective_is_integral && std::abs(val - std::round(val)) < 1e-5)
          val = std::round(val);
        if (!have_incumbent || val > best_value) {
          have_incumbent = true;
          best_value = val;
          best_x = xhat;
          res.stats.incumbent_trace.emplace_back(res.stats.node_count, val);
        }
        fathomed = true;
        break;
      }

      if (limit_hit || fathomed) {
        plunging = !fathomed;  // on limit the outer loop exits anyway
        break;
      }

      // branch on the most fractional column (ties already at lowest index)
      int frac_col = -1;
      double best_dist = kIntegralityTol;
      for (int j = 0; j < p.num_cols(); ++j) {
        if (!p.cols[j].integer) continue;
        const double v = lp.col_value(j);
        const double f = v - std::floor(v);
        const double dist = std::min(f, 1.0 - f);
        if (dist > best_dist + 1e-12) {
          best_dist = dist;
          frac_col = j;
        }
      }
      if (frac_col < 0) throw std::logic_error("branch_and_cut: lost branching column");

      const double v = lp.col_value(frac_col);
      const double fl = std::floor(v);
      const double cur_lo = lp.var_lo(frac_col);
      const double cur_hi = lp.var_hi(frac_col);
      const double node_bound = nodes[id].bound;
      Node down{id, frac_col, cur_lo, fl, node_bound};
      Node up{id, frac_col, fl + 1.0, cur_hi, node_bound};

      const bool up_first = (v - fl) >= 0.5;
      const Node& deferred = up_first ? down : up;
      const Node& preferred = up_first ? up : down;

      if (deferred.lo <= deferred.hi) {
        nodes.push_back(deferred);
        heap.push_back({node_bound, seq_counter++, static_cast<int>(nodes.size()) - 1});
        std::push_heap(heap.begin(), heap.end(), heap_less);
      }
      if (preferred.lo > preferred.hi) {
        plunging = false;
        break;
      }
      nodes.push_back(preferred);
      id = static_cast<int>(nodes.size()) - 1;
      lp.set_var_bounds(preferred.branch_col, preferred.lo, preferred.hi);
      applied_cols.push_back(preferred.branch_col);
    }
  }

  res.stats.wall_time_sec = elapsed();

  if (limit_hit) {
    double open_bound = have_incumbent ? best_value : -kInfinity;
    for (const HeapEntry& e : heap) open_bound = std::max(open_bound, e.bound);
    res.status = BcSolveResult::Status::kLimit;
    res.bound = open_bound;
    if (have_incumbent) {
      res.x = best_x;
      res.value = best_value;
    }
    return res;
  }
  if (!have_incumbent) {
    res.status = BcSolveResult::Status::kInfeasible;
    return res;
  }
  res.status = BcSolveResult::Status::kOptimal;
  res.x = best_x;
  res.value = best_value;
  res.bound = best_value;
  return res;
}

/// CPLEX-LP text dump for external cross-checking.
inline void write_lp_format(const MilpProblem& p, std::ostream& os) {
  os << "Maximize\n obj:";
  bool first = true;
  for (int j = 0; j < p.num_cols(); ++j) {
    const double c = p.cols[j].objective;
    if (c == 0.0) continue;
    os << (c < 0 ? " - " : (first ? " " : " + ")) << std::abs(c) << " x" << j;
    first = false;
  }
  if (first) os << " 0 x0";
  os << "\nSubject To\n";
  for (size_t r = 0; r < p.rows.size(); ++r) {
    os << " c" << r << ":";
    bool f2 = true;
    for (auto [j, v] : p.rows[r].coeffs) {
      os << (v < 0 ? " - " : (f2 ? " " : " + ")) << std::abs(v) << " x" << j;
      f2 = false;
    }
    const char* rel = p.rows[r].sense == RowSense::kLe   ? "<="
                      : p.rows[r].sense == RowSense::kEq ? "="
                                                         : ">=";
    os << " " << rel << " " << p.rows[r].rhs << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < p.num_cols(); ++j)
    os << " " << p.cols[j].lo << " <= x" << j << " <= " << p.cols[j].hi << "\n";
  os << "Generals\n";
  for (int j = 0; j < p.num_cols(); ++j)
    if (p.cols[j].integer) os << " x" << j;
  os << "\nEnd\n";
}

}  // namespace isdp
