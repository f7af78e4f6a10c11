#pragma once

// CG-based branch and cut for ISDPs in dual form: the MILP over the polyhedral
// part F with a lazy PSD gate at integer points, pluggable separation routines
// producing dual matrices, and the S-CG strengthened rounding of their cuts.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "isdp/conic.hpp"
#include "isdp/linalg.hpp"
#include "isdp/milp.hpp"

namespace isdp {

/// A separation product: dual matrix plus how to round its cut.
struct DualMatrixCut {
  SymMatrix U;
  int block = 0;
  bool round = false;              // snap coefficients, strengthen the rhs
  Lattice lattice = Lattice::kAllIntegers;
};

/// Produces dual matrices for an integer point with lambda_min < -eps.
using SeparationRoutine = std::function<std::vector<DualMatrixCut>(
    const DualIsdpModel&, const std::vector<double>&)>;

struct BcConfig {
  double eps_psd = 1e-6;
  Lattice lattice = Lattice::kAllIntegers;
  std::string routine = "kt";  // "kt" or "cg"
  SolveLimits limits;
};

struct CutLogRecord {
  long callback_index = 0;
  CutProvenance provenance = CutProvenance::kEigenvalue;
  uint64_t coeff_hash = 0;
  double rhs = 0.0;
  double violation = 0.0;
};

struct IsdpSolveResult {
  enum class Status { kOptimal, kInfeasible, kLimit };
  Status status = Status::kInfeasible;
  std::vector<double> x;
  double value = -kInfinity;
  double bound = kInfinity;
  SolveStats stats;
  std::vector<LinearCut> cuts;
  std::vector<CutLogRecord> cut_log;
};

inline uint64_t cut_coeff_hash(const LinearCut& cut) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  for (auto [col, v] : cut.terms) {
    mix(static_cast<uint64_t>(col));
    mix(static_cast<uint64_t>(llround(v * 1e9)));
  }
  return h;
}

inline std::string cut_log_json_line(const CutLogRecord& r) {
  std::ostringstream os;
  os << "{\"node\":" << r.callback_index << ",\"provenance\":\""
     << provenance_name(r.provenance) << "\",\"coeff_hash\":\"" << std::hex
     << r.coeff_hash << std::dec << "\",\"rhs\":" << r.rhs
     << ",\"violation\":" << r.violation << "}";
  return os.str();
}

/// MILP over the polyhedral part F: the diagonal rows of every LMI block, the
/// model's affine rows, bounds, and the (max-sense) objective.
inline MilpProblem build_root_relaxation(const DualIsdpModel& model) {
  model.validate();
  for (const auto& b : model.var_bounds)
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi))
      throw std::invalid_argument(
          "build_root_relaxation: unbounded model (finite bounds required)");

  MilpProblem p;
  p.cols.reserve(model.num_vars);
  for (int j = 0; j < model.num_vars; ++j)
    p.add_column(model.var_bounds[j].lo, model.var_bounds[j].hi, model.objective[j],
                 model.integral[j]);

  for (const auto& blk : model.lmis) {
    const int n = blk.order();
    for (int d = 0; d < n; ++d) {
      LinearRow row;
      for (const auto& [var, a] : blk.coeff) {
        const double v = a(d, d);
        if (v != 0.0) row.coeffs.emplace_back(var, v);
      }
      row.sense = RowSense::kLe;
      row.rhs = blk.C(d, d);
      if (row.coeffs.empty()) {
        if (blk.C(d, d) < 0.0) {
          row.coeffs.emplace_back(0, 0.0);  // 0 <= negative: infeasible marker
          p.add_row(std::move(row));
        }
        continue;
      }
      p.add_row(std::move(row));
    }
  }
  for (const auto& r : model.linear_rows) p.add_row(r);
  p.objective_is_integral = model.objective_is_integral;
  return p;
}

/// Eigenvalue separator of the KT scheme: one rank-1 dual matrix per violated
/// LMI block, cut emitted without rounding.
inline std::vector<DualMatrixCut> kt_separator(const DualIsdpModel& model,
                                               const std::vector<double>& xhat,
                                               double eps_psd = 1e-6) {
  std::vector<DualMatrixCut> out;
  for (size_t b = 0; b < model.lmis.size(); ++b) {
    const SymMatrix z = model.lmis[b].slack_at(xhat);
    const EigenResult eig = min_eig(z);
    if (eig.value < -eps_psd)
      out.push_back({SymMatrix::outer(eig.vector), static_cast<int>(b), false,
                     Lattice::kAllIntegers});
  }
  return out;
}

/// CG-strengthened separator: scales the rank-1 eigenvector matrix by the
/// smallest multiplier in 1..10^4 that makes every <A_i, U> integral within
/// 1e-6, then rounds with the strengthened floor. Falls back to the plain
/// eigenvalue cut when no such multiplier exists.
inline std::vector<DualMatrixCut> cg_strengthened_separator(
    const DualIsdpModel& model, const std::vector<double>& xhat, Lattice lattice,
    double eps_psd = 1e-6, int max_multiplier = 10000) {
  std::vector<DualMatrixCut> out;
  for (size_t b = 0; b < model.lmis.size(); ++b) {
    const LmiBlock& blk = model.lmis[b];
    const SymMatrix z = blk.slack_at(xhat);
    const EigenResult eig = min_eig(z);
    if (eig.value >= -eps_psd) continue;
    const SymMatrix u0 = SymMatrix::outer(eig.vector);
    std::vector<double> coeffs;
    coeffs.reserve(blk.coeff.size());
    for (const auto& [var, a] : blk.coeff) coeffs.push_back(trace_inner(a, u0));
    int scale = 0;
    for (int s = 1; s <= max_multiplier; ++s) {
      bool ok = true;
      for (double c : coeffs)
        if (!near_integer(s * c, 1e-6)) {
          ok = false;
          break;
        }
      if (ok) {
        scale = s;
        break;
      }
    }
    if (scale == 0) {
      out.push_back({u0, static_cast<int>(b), false, Lattice::kAllIntegers});
    } else {
      SymMatrix u(u0.order());
      u.axpy(static_cast<double>(scale), u0);
      out.push_back({u, static_cast<int>(b), true, lattice});
    }
  }
  return out;
}

/// Converts a separation product into a linear cut over the model variables.
inline LinearCut realize_dual_cut(const DualIsdpModel& model, const DualMatrixCut& dm) {
  if (!dm.round) return cut_from_dual_matrix(model, dm.U, false, dm.block);
  const LmiBlock& blk = model.lmis.at(dm.block);
  std::vector<std::pair<int, double>> terms;
  std::vector<long long> ints;
  for (const auto& [var, a] : blk.coeff) {
    const double v = trace_inner(a, dm.U);
    if (!near_integer(v, 1e-6))
      throw std::invalid_argument("realize_dual_cut: non-integer coefficient after scaling");
    const long long snapped = llround(v);
    if (snapped != 0) {
      terms.emplace_back(var, static_cast<double>(snapped));
      ints.push_back(snapped);
    }
  }
  if (terms.empty()) throw std::invalid_argument("realize_dual_cut: all-zero cut");
  const double rhs = strengthened_floor(ints, trace_inner(blk.C, dm.U), dm.lattice);
  if (rhs == -kInfinity) return make_infeasibility_cut();
  return make_cut(std::move(terms), rhs, CutProvenance::kSCg);
}

namespace detail {

struct CutPool {
  std::set<std::vector<long long>> seen;
  bool insert(const LinearCut& cut) {
    std::vector<long long> key;
    key.reserve(cut.terms.size() * 2 + 1);
    for (auto [col, v] : cut.terms) {
      key.push_back(col);
      key.push_back(llround(v * 1e9));
    }
    key.push_back(llround(cut.rhs * 1e9));
    return seen.insert(std::move(key)).second;
  }
};

}  // namespace detail

/// Algorithm-1 driver with a caller-supplied cut source. The driver owns the
/// PSD acceptance gate: an integer point is accepted only when every LMI block
/// has lambda_min >= -eps_psd; otherwise `cuts_for` must supply at least one
/// new violated cut.
inline IsdpSolveResult solve_isdp_with_cuts(
    const DualIsdpModel& model, const BcConfig& cfg,
    const std::function<std::vector<LinearCut>(const std::vector<double>&)>& cuts_for) {
  MilpProblem root = build_root_relaxation(model);

  IsdpSolveResult res;
  detail::CutPool pool;
  long callback_index = 0;

  LazyCallback cb = [&](const std::vector<double>& xhat) -> std::vector<LinearCut> {
    ++callback_index;
    bool psd_ok = true;
    for (const auto& blk : model.lmis) {
      if (min_eig(blk.slack_at(xhat)).value < -cfg.eps_psd) {
        psd_ok = false;
        break;
      }
    }
    if (psd_ok) return {};
    std::vector<LinearCut> produced = cuts_for(xhat);
    std::vector<LinearCut> fresh;
    for (LinearCut& cut : produced) {
      if (!pool.insert(cut)) continue;  // near-duplicate within 1e-9
      res.cut_log.push_back({callback_index, cut.provenance, cut_coeff_hash(cut), cut.rhs,
                             cut.violation_at(xhat)});
      fresh.push_back(std::move(cut));
    }
    if (fresh.empty())
      throw std::runtime_error(
          "solve_isdp_with_cuts: separation produced no new violated cut at a "
          "PSD-infeasible point (callback " +
          std::to_string(callback_index) + ")");
    return fresh;
  };

  BcSolveResult bc = branch_and_cut(root, cb, cfg.limits);
  res.stats = bc.stats;
  res.cuts = bc.cuts;
  res.bound = bc.bound;
  switch (bc.status) {
    case BcSolveResult::Status::kOptimal: {
      res.status = IsdpSolveResult::Status::kOptimal;
      res.x = bc.x;
      res.value = bc.value;
      for (const auto& blk : model.lmis) {
        const double lmin = min_eig(blk.slack_at(res.x)).value;
        if (lmin < -cfg.eps_psd)
          throw std::runtime_error(
              "solve_isdp_with_cuts: final incumbent violates the LMI (lambda_min " +
              std::to_string(lmin) + ")");
      }
      break;
    }
    case BcSolveResult::Status::kInfeasible:
      res.status = IsdpSolveResult::Status::kInfeasible;
      break;
    case BcSolveResult::Status::kLimit:
      res.status = IsdpSolveResult::Status::kLimit;
      res.x = bc.x;
      res.value = bc.value;
      break;
  }
  return res;
}

/// Generic entry point: the configured routine ("kt" or "cg") provides the
/// dual matrices, realized as (strengthened) CG cuts.
inline IsdpSolveResult solve_isdp(const DualIsdpModel& model, const BcConfig& cfg = {}) {
  SeparationRoutine routine;
  if (cfg.routine == "kt") {
    routine = [&cfg](const DualIsdpModel& m, const std::vector<double>& x) {
      return kt_separator(m, x, cfg.eps_psd);
    };
  } else if (cfg.routine == "cg") {
    routine = [&cfg](const DualIsdpModel& m, const std::vector<double>& x) {
      return cg_strengthened_separator(m, x, cfg.lattice, cfg.eps_psd);
    };
  } else {
    throw std::invalid_argument("solve_isdp: unknown routine '" + cfg.routine + "'");
  }
  return solve_isdp_with_cuts(model, cfg, [&](const std::vector<double>& xhat) {
    std::vector<LinearCut> cuts;
    for (const DualMatrixCut& dm : routine(model, xhat))
      cuts.push_back(realize_dual_cut(model, dm));
    return cuts;
  });
}

}  // namespace isdp
