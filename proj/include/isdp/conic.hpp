#pragma once

// ISDP model representations in dual and primal form, CG / S-CG cut
// construction from dual matrices, the constructive TDI closure and the
// one-sided Dirichlet approximation search.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isdp/linalg.hpp"

namespace isdp {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// floor with a 1e-9 guard against values sitting just below an integer.
inline double guarded_floor(double x, double eps = 1e-9) {
  double f = std::floor(x);
  if (x - f > 1.0 - eps) f += 1.0;
  return f;
}

inline double guarded_ceil(double x, double eps = 1e-9) {
  double c = std::ceil(x);
  if (c - x > 1.0 - eps) c -= 1.0;
  return c;
}

inline bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) <= tol; }

struct Bounds {
  double lo = -kInfinity;
  double hi = kInfinity;
};

enum class RowSense { kLe, kEq, kGe };

struct LinearRow {
  std::vector<std::pair<int, double>> coeffs;  // sparse (column, value)
  RowSense sense = RowSense::kLe;
  double rhs = 0.0;
};

/// One linear matrix inequality C - sum_i A_i x_i >= 0. Coefficient matrices are
/// stored sparsely by variable; variables absent from the map have A_i = 0.
struct LmiBlock {
  SymMatrix C;
  std::map<int, SymMatrix> coeff;

  int order() const { return C.order(); }

  /// Z(x) = C - sum_i A_i x_i
  SymMatrix slack_at(const std::vector<double>& x) const {
    SymMatrix z = C;
    for (const auto& [var, a] : coeff) z.axpy(-x[var], a);
    return z;
  }
};

/// ISDP in dual form: max b^T x s.t. C - sum A_i x_i >= 0, x integer, plus
/// optional affine rows and bounds. Multiple LMI blocks are allowed; the plain
/// interchange format carries exactly one.
struct DualIsdpModel {
  int num_vars = 0;
  std::vector<double> objective;  // maximized
  std::vector<Bounds> var_bounds;
  std::vector<bool> integral;  // per variable
  std::vector<LinearRow> linear_rows;
  std::vector<LmiBlock> lmis;
  bool objective_is_integral = false;  // feasible points have integral objective

  int lmi_order() const { return lmis.empty() ? 0 : lmis[0].order(); }

  void validate() const {
    if (num_vars <= 0) throw std::invalid_argument("DualIsdpModel: no variables");
    if (static_cast<int>(objective.size()) != num_vars ||
        static_cast<int>(var_bounds.size()) != num_vars ||
        static_cast<int>(integral.size()) != num_vars)
      throw std::invalid_argument("DualIsdpModel: field length mismatch");
    if (lmis.empty()) throw std::invalid_argument("DualIsdpModel: no LMI block");
    for (const auto& blk : lmis)
      for (const auto& [var, a] : blk.coeff) {
        if (var < 0 || var >= num_vars)
          throw std::invalid_argument("DualIsdpModel: LMI variable out of range");
        if (a.order() != blk.C.order())
          throw std::invalid_argument("DualIsdpModel: LMI order mismatch");
      }
  }
};

/// Binary SDP in primal form (Examples over the elliptope / trace simplex).
struct PrimalBsdpModel {
  int n = 0;
  SymMatrix C;
  std::vector<std::pair<SymMatrix, double>> constraints;  // <A_i, X> = b_i
  bool diag_fixed_to_one = false;
  std::optional<int> trace_rhs;

  void validate() const {
    if (n < 1) throw std::invalid_argument("PrimalBsdpModel: n must be >= 1");
    if (trace_rhs && (*trace_rhs < 0 || *trace_rhs > n))
      throw std::invalid_argument("PrimalBsdpModel: trace rhs out of range");
  }
};

enum class CutProvenance { kEigenvalue, kCgRounded, kSCg, kTable2Type, kCoupling };

inline const char* provenance_name(CutProvenance p) {
  switch (p) {
    case CutProvenance::kEigenvalue: return "eigenvalue";
    case CutProvenance::kCgRounded: return "cg-rounded";
    case CutProvenance::kSCg: return "s-cg";
    case CutProvenance::kTable2Type: return "table2-type";
    case CutProvenance::kCoupling: return "coupling";
  }
  return "?";
}

/// Halfspace sum_i coeff_i x_i <= rhs. Terms are sparse and sorted by column.
struct LinearCut {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
  CutProvenance provenance = CutProvenance::kEigenvalue;

  double lhs_at(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& [col, v] : terms) s += v * x[col];
    return s;
  }
  double violation_at(const std::vector<double>& x) const { return lhs_at(x) - rhs; }
};

inline LinearCut make_cut(std::vector<std::pair<int, double>> terms, double rhs,
                          CutProvenance prov) {
  std::sort(terms.begin(), terms.end());
  std::erase_if(terms, [](const auto& t) { return t.second == 0.0; });
  if (terms.empty()) throw std::invalid_argument("LinearCut: all coefficients are zero");
  if (!std::isfinite(rhs)) throw std::invalid_argument("LinearCut: rhs not finite");
  return LinearCut{std::move(terms), rhs, prov};
}

/// 0^T x <= -1, emitted when a strengthened rounding proves integer infeasibility.
inline LinearCut make_infeasibility_cut(CutProvenance prov = CutProvenance::kSCg) {
  return LinearCut{{}, -1.0, prov};
}

namespace detail {
inline void require_psd(const SymMatrix& u, const char* where) {
  if (min_eig(u).value < -1e-9)
    throw std::invalid_argument(std::string(where) + ": dual matrix is not PSD");
}
}  // namespace detail

/// CG cut from a PSD dual matrix U for the given LMI block:
///   sum_i <A_i, U> x_i <= <C, U>,   floored to a CG cut when round_rhs is set
/// (requires every <A_i, U> within 1e-6 of an integer; coefficients are snapped).
inline LinearCut cut_from_dual_matrix(const DualIsdpModel& model, const SymMatrix& u,
                                      bool round_rhs, int block = 0,
                                      double int_tol = 1e-6) {
  const LmiBlock& lmi = model.lmis.at(block);
  if (u.order() != lmi.order())
    throw std::invalid_argument("cut_from_dual_matrix: U order mismatch");
  detail::require_psd(u, "cut_from_dual_matrix");

  std::vector<std::pair<int, double>> terms;
  for (const auto& [var, a] : lmi.coeff) {
    double v = trace_inner(a, u);
    if (round_rhs) {
      if (!near_integer(v, int_tol))
        throw std::invalid_argument(
            "cut_from_dual_matrix: <A_i, U> = " + std::to_string(v) +
            " is not integral within tolerance; CG rounding refused");
      v = std::round(v);
    }
    if (v != 0.0) terms.emplace_back(var, v);
  }
  double rhs = trace_inner(lmi.C, u);
  if (round_rhs) rhs = guarded_floor(rhs);
  return make_cut(std::move(terms), rhs,
                  round_rhs ? CutProvenance::kCgRounded : CutProvenance::kEigenvalue);
}

/// Coefficient-floored CG cut (valid only when every variable is nonnegative):
///   sum_i floor(<A_i,U>) x_i <= floor(<C,U>).
inline LinearCut floor_coefficient_cut(const DualIsdpModel& model, const SymMatrix& u,
                                       int block = 0) {
  for (const auto& b : model.var_bounds)
    if (b.lo < 0.0)
      throw std::invalid_argument(
          "floor_coefficient_cut: requires nonnegative variables (P in R^m_+)");
  const LmiBlock& lmi = model.lmis.at(block);
  if (u.order() != lmi.order())
    throw std::invalid_argument("floor_coefficient_cut: U order mismatch");
  detail::require_psd(u, "floor_coefficient_cut");

  std::vector<std::pair<int, double>> terms;
  for (const auto& [var, a] : lmi.coeff) {
    const double v = guarded_floor(trace_inner(a, u));
    if (v != 0.0) terms.emplace_back(var, v);
  }
  return make_cut(std::move(terms), guarded_floor(trace_inner(lmi.C, u)),
                  CutProvenance::kCgRounded);
}

enum class Lattice { kAllIntegers, kBinaryBox, kOracle };

/// Oracle signature for Lattice::kOracle: max{c^T x : c^T x <= d, x in S};
/// -infinity when the S-feasible set is empty.
using StrengthenOracle = std::function<double(const std::vector<long long>&, double)>;

/// Strengthened floor of Eq.-(9) type: max{c^T x : c^T x <= d, x in S}.
/// Returns -infinity when no S-point satisfies the inequality.
inline double strengthened_floor(const std::vector<long long>& c, double d, Lattice lattice,
                                 const StrengthenOracle& oracle = nullptr) {
  bool all_zero = true;
  for (long long v : c)
    if (v != 0) all_zero = false;
  if (all_zero) throw std::invalid_argument("strengthened_floor: c must not be all zero");

  switch (lattice) {
    case Lattice::kAllIntegers: {
      long long g = 0;
      for (long long v : c) g = std::gcd(g, v);
      const double gg = static_cast<double>(g);
      return gg * guarded_floor(d / gg);
    }
    case Lattice::kBinaryBox: {
      long long neg = 0, pos = 0;
      for (long long v : c) {
        if (v < 0) neg += v;
        if (v > 0) pos += v;
      }
      const long long width = pos - neg;
      std::vector<char> reach(static_cast<size_t>(width) + 1, 0);
      reach[static_cast<size_t>(-neg)] = 1;  // offset so index = sum - neg
      for (long long v : c) {
        if (v == 0) continue;
        if (v > 0) {
          for (long long s = width; s >= v; --s)
            if (reach[static_cast<size_t>(s - v)]) reach[static_cast<size_t>(s)] |= 1;
        } else {
          for (long long s = 0; s <= width + v; ++s)
            if (reach[static_cast<size_t>(s - v)]) reach[static_cast<size_t>(s)] |= 1;
        }
      }
      const double dcap = guarded_floor(d);
      double best = -kInfinity;
      for (long long s = 0; s <= width; ++s) {
        if (!reach[static_cast<size_t>(s)]) continue;
        const double sum = static_cast<double>(s + neg);
        if (sum <= dcap && sum > best) best = sum;
      }
      return best;
    }
    case Lattice::kOracle:
      if (!oracle) throw std::invalid_argument("strengthened_floor: oracle not provided");
      return oracle(c, d);
  }
  throw std::logic_error("strengthened_floor: unreachable");
}

/// Polyhedral closure rows B x <= d, one per subset S of [n].
struct TdiClosure {
  int n = 0;
  int m = 0;
  std::vector<uint32_t> subsets;           // bitmask per row, row 0 is S = {}
  std::vector<std::vector<long long>> B;   // row-major coefficients
  std::vector<long long> d;
  // Q equals c(P) only when the LMI system is totally dual integral and
  // satisfies Slater's condition; this constructor does not verify either.
  bool assumes_tdi_and_slater = true;
};

/// Constructive closure of the TDI theorem: B_{S,i} = <A_i, 1_S 1_S^T> (exact
/// integer arithmetic), d_S = floor(<C, 1_S 1_S^T>) with a 1e-9 floor guard.
inline TdiClosure tdi_closure(const DualIsdpModel& model, int block = 0) {
  const LmiBlock& lmi = model.lmis.at(block);
  const int n = lmi.order();
  if (n > 20) throw std::invalid_argument("tdi_closure: n > 20 enumeration guard");

  // integer copies of the A_i
  std::vector<int> vars;
  std::vector<std::vector<long long>> ints;
  for (const auto& [var, a] : lmi.coeff) {
    vars.push_back(var);
    std::vector<long long> ai(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = a(i, j);
        if (!near_integer(v, 1e-9))
          throw std::invalid_argument("tdi_closure: A_i must be integer matrices");
        ai[static_cast<size_t>(i) * n + j] = llround(v);
      }
    ints.push_back(std::move(ai));
  }

  TdiClosure out;
  out.n = n;
  out.m = model.num_vars;
  const uint32_t total = 1u << n;
  out.subsets.reserve(total);
  out.B.reserve(total);
  out.d.reserve(total);
  for (uint32_t mask = 0; mask < total; ++mask) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) members.push_back(i);
    std::vector<long long> row(model.num_vars, 0);
    for (size_t t = 0; t < vars.size(); ++t) {
      long long s = 0;
      for (int p : members)
        for (int q : members) s += ints[t][static_cast<size_t>(p) * n + q];
      row[vars[t]] = s;
    }
    double crhs = 0.0;
    for (int p : members)
      for (int q : members) crhs += lmi.C(p, q);
    out.subsets.push_back(mask);
    out.B.push_back(std::move(row));
    out.d.push_back(static_cast<long long>(guarded_floor(crhs)));
  }
  return out;
}

/// Smallest p (bounded linear search) with frac(p d) <= 1/N. The search range
/// starts at N^2 and escalates x10 up to N^6 before giving up; the corollary's
/// existence guarantee makes the base range sufficient for representable inputs.
inline long long one_sided_dirichlet(double d, long long n_approx) {
  if (n_approx < 2) throw std::invalid_argument("one_sided_dirichlet: N must be >= 2");
  const double bound = 1.0 / static_cast<double>(n_approx);
  long long best_p = 1;
  double best_frac = 2.0;
  long long limit = n_approx * n_approx;
  const long long hard_limit = n_approx * n_approx * n_approx * n_approx * n_approx * n_approx;
  long long p = 1;
  while (true) {
    for (; p <= limit; ++p) {
      const double pd = p * d;
      const double frac = pd - std::floor(pd);
      if (frac <= bound) return p;
      if (frac < best_frac) {
        best_frac = frac;
        best_p = p;
      }
    }
    if (limit >= hard_limit) break;
    limit = std::min(hard_limit, limit * 10);
  }
  throw std::runtime_error("one_sided_dirichlet: search exhausted; best p = " +
                           std::to_string(best_p) + " with fractional part " +
                           std::to_string(best_frac));
}

}  // namespace isdp
