#pragma once

// Bounded-variable revised simplex over sparse columns. One logical column per
// row; composite primal phase 1 for cold starts, dual simplex for warm
// re-solves after bound changes and row additions. Basis factorization via
// Eigen SparseLU with product-form eta updates and periodic refactorization.
//
// Internal objective sense is MINIMIZE; callers negate for maximization.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "isdp/conic.hpp"  // RowSense, kInfinity

namespace isdp::lp {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kCutoff, kIterLimit };

struct LpInfo {
  LpStatus status = LpStatus::kIterLimit;
  double objective = 0.0;  // min-form objective at exit
  long iterations = 0;
};

class LpSolver {
 public:
  static constexpr double kFeasTol = 1e-7;
  static constexpr double kDualTol = 1e-9;
  static constexpr double kPivotTol = 1e-8;
  static constexpr int kRefactorEvery = 100;
  static constexpr int kBlandTrigger = 1000;  // consecutive degenerate pivots

  explicit LpSolver(int n_struct) : n_struct_(n_struct) {
    col_start_.assign(n_struct + 1, 0);
    lo_.assign(n_struct, 0.0);
    up_.assign(n_struct, 0.0);
    cost_.assign(n_struct, 0.0);
  }

  void set_cost(int j, double c) { cost_[j] = c; }

  /// Columns must be loaded in index order, before any row is added.
  void load_column(int j, const std::vector<std::pair<int, double>>& entries) {
    if (j != loaded_cols_) throw std::logic_error("LpSolver: columns must load in order");
    for (auto [r, v] : entries) {
      col_row_.push_back(r);
      col_val_.push_back(v);
    }
    col_start_[j + 1] = static_cast<int>(col_row_.size());
    ++loaded_cols_;
  }

  /// Appends a row and its logical column. If a basis exists the new logical
  /// joins it, which keeps the basis dual feasible for the next warm re-solve.
  void add_row(const std::vector<std::pair<int, double>>& terms, RowSense sense, double rhs) {
    const int r = m_rows_;
    ++m_rows_;
    rhs_.push_back(rhs);
    for (auto [j, v] : terms) {
      row_cols_.push_back(j);
      row_vals_.push_back(v);
      row_of_entry_.push_back(r);
    }
    double lo = 0.0, hi = 0.0;
    if (sense == RowSense::kLe) hi = kInfinity;
    if (sense == RowSense::kGe) lo = -kInfinity;
    logical_lo_.push_back(lo);
    logical_hi_.push_back(hi);
    rows_dirty_ = true;
  }

  int num_rows() const { return m_rows_; }
  int num_structural() const { return n_struct_; }

  void set_var_bounds(int j, double lo, double hi) {
    lo_[j] = lo;
    up_[j] = hi;
    if (built_ && vstat_[j] != Stat::kBasic) {
      if (vstat_[j] == Stat::kUpper)
        xval_[j] = std::isfinite(hi) ? hi : lo;
      else
        xval_[j] = std::isfinite(lo) ? lo : hi;
    }
  }

  double var_lo(int j) const { return lo_[j]; }
  double var_hi(int j) const { return up_[j]; }

  /// Dual-simplex early stop: the min-form objective only increases, so once it
  /// exceeds the cutoff the node cannot beat the incumbent.
  void set_cutoff(double cutoff_min) { cutoff_ = cutoff_min; }
  void clear_cutoff() { cutoff_ = kInfinity; }

  double objective_min() const { return obj_; }
  double col_value(int j) const { return xval_[j]; }
  bool has_basis() const { return built_; }

  /// Cold or warm primal solve: composite phase 1, then primal phase 2.
  LpInfo solve_primal() {
    if (!built_) {
      build_structures();
      reset_to_slack_basis();
    } else {
      if (rows_dirty_) rebuild_after_rows();
      refresh_basic_values();
    }
    LpInfo info;
    long iters = 0;
    if (!phase1(iters)) {
      info.status = LpStatus::kInfeasible;
      info.iterations = iters;
      recompute_objective();
      info.objective = obj_;
      return info;
    }
    info = phase2_primal(iters);
    info.iterations = iters;
    return info;
  }

  /// Warm re-solve from the current basis. Bound changes since the last solve
  /// may leave nonbasic columns on the wrong side for their reduced cost
  /// (e.g. a re-relaxed branching variable); those are flipped to the other
  /// bound first, which restores dual feasibility and lets the dual simplex
  /// repair the primal side. Falls back to a cold primal solve on trouble.
  LpInfo solve_dual() {
    if (!built_) return solve_primal();
    if (rows_dirty_) rebuild_after_rows();
    verify_and_repair_duals();
    long iters = 0;
    LpInfo info = dual_iterate(iters);
    info.iterations = iters;
    if (info.status == LpStatus::kIterLimit) {
      reset_to_slack_basis();
      LpInfo retry = solve_primal();
      retry.iterations += iters;
      return retry;
    }
    return info;
  }

  /// Max-norm of |Ax - b| over all rows, for diagnostics and tests.
  double primal_residual() const {
    std::vector<double> act(m_rows_, 0.0);
    for (int j = 0; j < n_struct_; ++j) {
      const double v = xval_[j];
      if (v == 0.0) continue;
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
        act[col_row_[k]] += col_val_[k] * v;
    }
    for (int r = 0; r < m_rows_; ++r) act[r] += xval_[n_struct_ + r];
    double resid = 0.0;
    for (int r = 0; r < m_rows_; ++r) resid = std::max(resid, std::abs(act[r] - rhs_[r]));
    return resid;
  }

 private:
  enum class Stat : uint8_t { kLower, kUpper, kBasic };

  int n_struct_ = 0;
  int loaded_cols_ = 0;
  int m_rows_ = 0;
  bool built_ = false;
  bool rows_dirty_ = false;

  // structural columns, CSC
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  // staged entries of rows added after the initial build
  std::vector<int> row_cols_, row_of_entry_;
  std::vector<double> row_vals_;

  std::vector<double> rhs_, logical_lo_, logical_hi_;
  std::vector<double> lo_, up_, cost_;
  std::vector<double> xval_, d_;
  std::vector<Stat> vstat_;
  std::vector<int> basic_;      // row -> column
  std::vector<int> basis_row_;  // column -> row or -1
  double obj_ = 0.0;
  double cutoff_ = kInfinity;

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  struct Eta {
    int row;
    double pivot;
    std::vector<std::pair<int, double>> w;  // spike without the pivot entry
  };
  std::vector<Eta> etas_;
  Eigen::VectorXd work_, rho_;
  std::vector<std::pair<int, double>> alpha_cache_;

  int total_cols() const { return n_struct_ + m_rows_; }
  double col_cost(int j) const { return j < n_struct_ ? cost_[j] : 0.0; }
  double col_lo(int j) const { return j < n_struct_ ? lo_[j] : logical_lo_[j - n_struct_]; }
  double col_hi(int j) const { return j < n_struct_ ? up_[j] : logical_hi_[j - n_struct_]; }

  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < n_struct_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) f(col_row_[k], col_val_[k]);
    } else {
      f(j - n_struct_, 1.0);
    }
  }

  void build_structures() {
    if (loaded_cols_ != n_struct_) throw std::logic_error("LpSolver: missing columns");
    consume_staged_rows();
    lo_.resize(total_cols());
    up_.resize(total_cols());
    for (int r = 0; r < m_rows_; ++r) {
      lo_[n_struct_ + r] = logical_lo_[r];
      up_[n_struct_ + r] = logical_hi_[r];
    }
    xval_.assign(total_cols(), 0.0);
    d_.assign(total_cols(), 0.0);
    vstat_.assign(total_cols(), Stat::kLower);
    basic_.assign(m_rows_, -1);
    basis_row_.assign(total_cols(), -1);
    built_ = true;
    rows_dirty_ = false;
  }

  void consume_staged_rows() {
    if (row_cols_.empty()) return;
    std::vector<int> extra(n_struct_, 0);
    for (int j : row_cols_) ++extra[j];
    std::vector<int> new_start(n_struct_ + 1, 0);
    for (int j = 0; j < n_struct_; ++j)
      new_start[j + 1] = new_start[j] + (col_start_[j + 1] - col_start_[j]) + extra[j];
    std::vector<int> nr(new_start[n_struct_]);
    std::vector<double> nv(new_start[n_struct_]);
    std::vector<int> fill(n_struct_, 0);
    for (int j = 0; j < n_struct_; ++j)
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        nr[new_start[j] + fill[j]] = col_row_[k];
        nv[new_start[j] + fill[j]] = col_val_[k];
        ++fill[j];
      }
    for (size_t t = 0; t < row_cols_.size(); ++t) {
      const int j = row_cols_[t];
      nr[new_start[j] + fill[j]] = row_of_entry_[t];
      nv[new_start[j] + fill[j]] = row_vals_[t];
      ++fill[j];
    }
    col_start_ = std::move(new_start);
    col_row_ = std::move(nr);
    col_val_ = std::move(nv);
    row_cols_.clear();
    row_vals_.clear();
    row_of_entry_.clear();
  }

  void rebuild_after_rows() {
    const int old_rows = static_cast<int>(basic_.size());
    consume_staged_rows();
    lo_.resize(total_cols());
    up_.resize(total_cols());
    xval_.resize(total_cols(), 0.0);
    d_.resize(total_cols(), 0.0);
    vstat_.resize(total_cols(), Stat::kLower);
    basic_.resize(m_rows_);
    for (int r = 0; r < m_rows_; ++r) {
      lo_[n_struct_ + r] = logical_lo_[r];
      up_[n_struct_ + r] = logical_hi_[r];
    }
    for (int r = old_rows; r < m_rows_; ++r) {
      basic_[r] = n_struct_ + r;
      vstat_[n_struct_ + r] = Stat::kBasic;
    }
    basis_row_.assign(total_cols(), -1);
    for (int r = 0; r < m_rows_; ++r) basis_row_[basic_[r]] = r;
    rows_dirty_ = false;
    refactorize();
  }

  void reset_to_slack_basis() {
    for (int j = 0; j < n_struct_; ++j) {
      if (std::isfinite(lo_[j])) {
        vstat_[j] = Stat::kLower;
        xval_[j] = lo_[j];
      } else if (std::isfinite(up_[j])) {
        vstat_[j] = Stat::kUpper;
        xval_[j] = up_[j];
      } else {
        vstat_[j] = Stat::kLower;
        xval_[j] = 0.0;
      }
    }
    for (int r = 0; r < m_rows_; ++r) {
      basic_[r] = n_struct_ + r;
      vstat_[n_struct_ + r] = Stat::kBasic;
    }
    basis_row_.assign(total_cols(), -1);
    for (int r = 0; r < m_rows_; ++r) basis_row_[basic_[r]] = r;
    refactorize();
  }

  void refactorize() {
    if (m_rows_ == 0) {
      etas_.clear();
      refresh_basic_values();
      recompute_duals();
      return;
    }
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(col_row_.size() + m_rows_);
    for (int r = 0; r < m_rows_; ++r) {
      const int j = basic_[r];
      for_col(j, [&](int row, double v) { trips.emplace_back(row, r, v); });
    }
    Eigen::SparseMatrix<double> b(m_rows_, m_rows_);
    b.setFromTriplets(trips.begin(), trips.end());
    lu_.compute(b);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("LpSolver: singular basis at refactorization");
    etas_.clear();
    refresh_basic_values();
    recompute_duals();
  }

  void ftran(Eigen::VectorXd& v) {
    if (m_rows_ == 0) return;
    v = lu_.solve(v);
    for (const Eta& e : etas_) {
      const double t = v[e.row] / e.pivot;
      if (t != 0.0) {
        for (auto [i, w] : e.w) v[i] -= t * w;
      }
      v[e.row] = t;
    }
  }

  void btran(Eigen::VectorXd& v) {
    if (m_rows_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double dot = 0.0;
      for (auto [i, w] : it->w) dot += w * v[i];
      v[it->row] = (v[it->row] - dot) / it->pivot;
    }
    v = lu_.transpose().solve(v);
  }

  void refresh_basic_values() {
    work_ = Eigen::VectorXd::Zero(m_rows_);
    for (int r = 0; r < m_rows_; ++r) work_[r] = rhs_[r];
    for (int j = 0; j < total_cols(); ++j) {
      if (vstat_[j] == Stat::kBasic) continue;
      const double v = xval_[j];
      if (v == 0.0) continue;
      for_col(j, [&](int row, double a) { work_[row] -= a * v; });
    }
    ftran(work_);
    for (int r = 0; r < m_rows_; ++r) xval_[basic_[r]] = work_[r];
    recompute_objective();
  }

  void recompute_objective() {
    double s = 0.0;
    for (int j = 0; j < n_struct_; ++j) s += cost_[j] * xval_[j];
    obj_ = s;
  }

  void recompute_duals() {
    work_ = Eigen::VectorXd::Zero(m_rows_);
    for (int r = 0; r < m_rows_; ++r) work_[r] = col_cost(basic_[r]);
    btran(work_);
    for (int j = 0; j < total_cols(); ++j) {
      if (vstat_[j] == Stat::kBasic) {
        d_[j] = 0.0;
        continue;
      }
      double dot = 0.0;
      for_col(j, [&](int row, double a) { dot += a * work_[row]; });
      d_[j] = col_cost(j) - dot;
    }
  }

  double max_violation() const {
    double worst = 0.0;
    for (int r = 0; r < m_rows_; ++r) {
      const int j = basic_[r];
      worst = std::max(worst, col_lo(j) - xval_[j]);
      worst = std::max(worst, xval_[j] - col_hi(j));
    }
    return worst;
  }

  void push_eta(int row, const Eigen::VectorXd& w) {
    Eta e;
    e.row = row;
    e.pivot = w[row];
    for (int i = 0; i < m_rows_; ++i)
      if (i != row && w[i] != 0.0) e.w.emplace_back(i, w[i]);
    etas_.push_back(std::move(e));
    if (static_cast<int>(etas_.size()) >= kRefactorEvery) refactorize();
  }

  // ---- primal simplex ----

  // one iteration; phase 1 uses composite infeasibility costs.
  // returns 0 = moved, 1 = no entering column, 2 = unbounded
  int primal_step(bool phase1_mode, bool bland, long& iters, int& degen_count) {
    work_ = Eigen::VectorXd::Zero(m_rows_);
    bool any_cost = false;
    for (int r = 0; r < m_rows_; ++r) {
      const int j = basic_[r];
      double c;
      if (phase1_mode) {
        if (xval_[j] < col_lo(j) - kFeasTol)
          c = -1.0;
        else if (xval_[j] > col_hi(j) + kFeasTol)
          c = 1.0;
        else
          c = 0.0;
      } else {
        c = col_cost(j);
      }
      work_[r] = c;
      any_cost |= (c != 0.0);
    }
    if (phase1_mode && !any_cost) return 1;
    btran(work_);

    int q = -1;
    double best = kDualTol;
    int dir = 0;
    for (int j = 0; j < total_cols(); ++j) {
      if (vstat_[j] == Stat::kBasic || col_lo(j) == col_hi(j)) continue;
      double dot = 0.0;
      for_col(j, [&](int row, double a) { dot += a * work_[row]; });
      const double dj = (phase1_mode ? 0.0 : col_cost(j)) - dot;
      double score = 0.0;
      int cand_dir = 0;
      if (vstat_[j] == Stat::kLower && dj < -kDualTol) {
        score = -dj;
        cand_dir = 1;
      } else if (vstat_[j] == Stat::kUpper && dj > kDualTol) {
        score = dj;
        cand_dir = -1;
      } else {
        continue;
      }
      if (bland) {
        q = j;
        dir = cand_dir;
        break;
      }
      if (score > best) {
        best = score;
        q = j;
        dir = cand_dir;
      }
    }
    if (q < 0) return 1;

    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_rows_);
    for_col(q, [&](int row, double a) { w[row] = a; });
    ftran(w);

    double t_max = col_hi(q) - col_lo(q);  // bound-flip distance
    int leave_row = -1;
    double leave_to = 0.0;
    for (int r = 0; r < m_rows_; ++r) {
      const double wr = w[r];
      if (std::abs(wr) < kPivotTol) continue;
      const int bj = basic_[r];
      const double delta = -dir * wr;  // change of x_bj per unit step
      const double v = xval_[bj];
      double bound;
      if (delta > 0) {
        if (phase1_mode && v < col_lo(bj) - kFeasTol)
          bound = col_lo(bj);  // infeasible below, rising: blocks on feasibility
        else if (phase1_mode && v > col_hi(bj) + kFeasTol)
          continue;  // infeasible above, rising further: no bound crossed
        else
          bound = col_hi(bj);
      } else {
        if (phase1_mode && v > col_hi(bj) + kFeasTol)
          bound = col_hi(bj);
        else if (phase1_mode && v < col_lo(bj) - kFeasTol)
          continue;
        else
          bound = col_lo(bj);
      }
      if (!std::isfinite(bound)) continue;
      double ratio = (bound - v) / delta;
      if (ratio < 0.0) ratio = 0.0;
      if (leave_row < 0) {
        if (ratio < t_max - 1e-10) {
          t_max = ratio;
          leave_row = r;
          leave_to = bound;
        }
      } else if (ratio < t_max - 1e-10 ||
                 (ratio < t_max + 1e-10 && std::abs(wr) > std::abs(w[leave_row]))) {
        t_max = ratio;
        leave_row = r;
        leave_to = bound;
      }
    }

    if (!std::isfinite(t_max)) return 2;

    ++iters;
    if (t_max < 1e-10)
      ++degen_count;
    else
      degen_count = 0;

    if (t_max > 0.0) {
      for (int r = 0; r < m_rows_; ++r)
        if (w[r] != 0.0) xval_[basic_[r]] -= dir * t_max * w[r];
      xval_[q] += dir * t_max;
    }
    if (leave_row < 0) {
      vstat_[q] = (vstat_[q] == Stat::kLower) ? Stat::kUpper : Stat::kLower;
      return 0;
    }
    const int leaving = basic_[leave_row];
    xval_[leaving] = leave_to;
    vstat_[leaving] = (leave_to == col_lo(leaving)) ? Stat::kLower : Stat::kUpper;
    vstat_[q] = Stat::kBasic;
    basic_[leave_row] = q;
    basis_row_[leaving] = -1;
    basis_row_[q] = leave_row;
    push_eta(leave_row, w);
    return 0;
  }

  bool phase1(long& iters) {
    int degen = 0;
    bool bland = false;
    long local = 0;
    const long cap = 200000 + 200L * (m_rows_ + total_cols());
    while (max_violation() > kFeasTol) {
      const int rc = primal_step(true, bland, iters, degen);
      if (rc == 1) return max_violation() <= kFeasTol;
      if (rc == 2) throw std::runtime_error("LpSolver: unbounded phase-1 direction");
      if (degen > kBlandTrigger) bland = true;
      if (++local > cap)
        throw std::runtime_error("LpSolver: phase-1 cycling beyond iteration cap");
    }
    return true;
  }

  LpInfo phase2_primal(long& iters) {
    int degen = 0;
    bool bland = false;
    long local = 0;
    const long cap = 400000 + 400L * (m_rows_ + total_cols());
    LpInfo info;
    while (true) {
      const int rc = primal_step(false, bland, iters, degen);
      if (rc == 1) {
        recompute_duals();
        recompute_objective();
        info.status = LpStatus::kOptimal;
        info.objective = obj_;
        return info;
      }
      if (rc == 2) {
        info.status = LpStatus::kUnbounded;
        return info;
      }
      if (degen > kBlandTrigger) bland = true;
      if (++local > cap)
        throw std::runtime_error("LpSolver: phase-2 cycling beyond iteration cap");
    }
  }

  // ---- dual simplex ----

  /// Recomputes reduced costs and flips nonbasic columns sitting on the wrong
  /// side for their sign; refreshes basic values. Returns true when the basis
  /// was already clean (so its objective is a certified dual bound).
  bool verify_and_repair_duals() {
    recompute_duals();
    bool clean = true;
    for (int j = 0; j < total_cols(); ++j) {
      if (vstat_[j] == Stat::kBasic || col_lo(j) == col_hi(j)) continue;
      if (vstat_[j] == Stat::kLower && d_[j] < -kDualTol && std::isfinite(col_hi(j))) {
        vstat_[j] = Stat::kUpper;
        xval_[j] = col_hi(j);
        clean = false;
      } else if (vstat_[j] == Stat::kUpper && d_[j] > kDualTol &&
                 std::isfinite(col_lo(j))) {
        vstat_[j] = Stat::kLower;
        xval_[j] = col_lo(j);
        clean = false;
      }
    }
    refresh_basic_values();
    return clean;
  }

  LpInfo dual_iterate(long& iters) {
    LpInfo info;
    int degen = 0;
    bool bland = false;
    long local = 0;
    int repair_rounds = 0;
    const long cap = 400000 + 400L * (m_rows_ + total_cols());
    while (true) {
      if (obj_ > cutoff_) {
        // certify the bound before pruning: incremental duals may have drifted
        if (verify_and_repair_duals() && obj_ > cutoff_) {
          info.status = LpStatus::kCutoff;
          info.objective = obj_;
          return info;
        }
        if (++repair_rounds > 50) {
          info.status = LpStatus::kIterLimit;
          return info;
        }
        if (obj_ > cutoff_) continue;  // re-certify on the repaired basis
      }
      int r_leave = -1;
      double worst = kFeasTol;
      for (int r = 0; r < m_rows_; ++r) {
        const int j = basic_[r];
        const double viol = std::max(col_lo(j) - xval_[j], xval_[j] - col_hi(j));
        if (viol > worst) {
          worst = viol;
          r_leave = r;
        }
      }
      if (r_leave < 0) {
        if (!verify_and_repair_duals()) {
          if (++repair_rounds > 50) {
            info.status = LpStatus::kIterLimit;
            return info;
          }
          continue;  // repaired: primal side may be broken again
        }
        info.status = LpStatus::kOptimal;
        info.objective = obj_;
        return info;
      }

      const int jl = basic_[r_leave];
      const bool below = xval_[jl] < col_lo(jl);
      const double target = below ? col_lo(jl) : col_hi(jl);

      rho_ = Eigen::VectorXd::Zero(m_rows_);
      rho_[r_leave] = 1.0;
      btran(rho_);

      // single pass: cache alphas, pick the entering column by dual ratio
      alpha_cache_.clear();
      int q = -1;
      double best_ratio = kInfinity;
      double alpha_q = 0.0;
      for (int j = 0; j < total_cols(); ++j) {
        if (vstat_[j] == Stat::kBasic) continue;
        double alpha = 0.0;
        for_col(j, [&](int row, double a) { alpha += a * rho_[row]; });
        if (std::abs(alpha) < 1e-12) continue;
        alpha_cache_.emplace_back(j, alpha);
        if (col_lo(j) == col_hi(j) || std::abs(alpha) < kPivotTol) continue;
        const bool qualifies = below ? ((vstat_[j] == Stat::kLower && alpha < 0.0) ||
                                        (vstat_[j] == Stat::kUpper && alpha > 0.0))
                                     : ((vstat_[j] == Stat::kLower && alpha > 0.0) ||
                                        (vstat_[j] == Stat::kUpper && alpha < 0.0));
        if (!qualifies) continue;
        const double ratio = std::abs(d_[j]) / std::abs(alpha);
        if (bland) {
          if (q < 0) {
            q = j;
            alpha_q = alpha;
          }
        } else if (ratio < best_ratio - 1e-12 ||
                   (ratio < best_ratio + 1e-12 &&
                    (q < 0 || std::abs(alpha) > std::abs(alpha_q)))) {
          best_ratio = ratio;
          q = j;
          alpha_q = alpha;
        }
      }
      if (q < 0) {
        // re-check the violation on exactly recomputed basic values first
        refresh_basic_values();
        const int jv = basic_[r_leave];
        if (std::max(col_lo(jv) - xval_[jv], xval_[jv] - col_hi(jv)) <= kFeasTol)
          continue;
        info.status = LpStatus::kInfeasible;
        info.objective = obj_;
        return info;
      }

      const double delta_q = (xval_[jl] - target) / alpha_q;
      Eigen::VectorXd w = Eigen::VectorXd::Zero(m_rows_);
      for_col(q, [&](int row, double a) { w[row] = a; });
      ftran(w);

      ++iters;
      if (std::abs(d_[q]) < 1e-12)
        ++degen;
      else
        degen = 0;
      if (degen > kBlandTrigger) bland = true;

      obj_ += d_[q] * delta_q;

      for (int r = 0; r < m_rows_; ++r)
        if (w[r] != 0.0) xval_[basic_[r]] -= delta_q * w[r];
      xval_[q] += delta_q;
      xval_[jl] = target;

      const double theta_d = d_[q] / alpha_q;
      if (theta_d != 0.0)
        for (auto [j, alpha] : alpha_cache_)
          if (j != q) d_[j] -= theta_d * alpha;
      d_[jl] = -theta_d;
      d_[q] = 0.0;

      vstat_[jl] = (target == col_lo(jl)) ? Stat::kLower : Stat::kUpper;
      vstat_[q] = Stat::kBasic;
      basic_[r_leave] = q;
      basis_row_[jl] = -1;
      basis_row_[q] = r_leave;
      push_eta(r_leave, w);

      if (++local > cap) {
        info.status = LpStatus::kIterLimit;
        return info;
      }
    }
  }
};

}  // namespace isdp::lp
