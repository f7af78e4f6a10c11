#pragma once

// The QTSP application: algebraic-connectivity ISDP formulations (level 1 and
// 2), cycle-cover analysis, eigenvector cuts, the subtour-elimination cut
// family, the six separation settings, the symmetric reduction, and the
// brute-force oracle.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "isdp/conic.hpp"
#include "isdp/isdp_bc.hpp"
#include "isdp/linalg.hpp"

namespace isdp {

/// Directed or undirected QTSP instance with a sparse two-arc cost map.
/// Indices are 0-based internally; the JSON interchange format is 1-based.
struct QtspInstance {
  int n = 0;
  bool symmetric = false;
  std::vector<std::pair<int, int>> arcs;  // arcs, or edges (i < j) when symmetric
  std::unordered_map<int64_t, double> q;  // (i,j,k) -> cost; canonical key when symmetric

  int64_t key(int i, int j, int k) const {
    if (symmetric && i > k) std::swap(i, k);
    return (static_cast<int64_t>(i) * n + j) * n + k;
  }

  void set_cost(int i, int j, int k, double c) {
    if (c != 0.0) q[key(i, j, k)] = c;
  }

  double cost(int i, int j, int k) const {
    const auto it = q.find(key(i, j, k));
    return it == q.end() ? 0.0 : it->second;
  }

  bool integral_costs() const {
    for (const auto& [k, c] : q)
      if (!near_integer(c, 1e-12)) return false;
    return true;
  }

  void validate() const {
    if (n < 3) throw std::invalid_argument("QtspInstance: n must be >= 3");
    std::set<std::pair<int, int>> seen;
    for (auto [i, j] : arcs) {
      if (i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("QtspInstance: arc endpoint out of range");
      if (i == j) throw std::invalid_argument("QtspInstance: self-loop");
      if (symmetric && i > j)
        throw std::invalid_argument("QtspInstance: symmetric edges must have i < j");
      if (!seen.insert({i, j}).second)
        throw std::invalid_argument("QtspInstance: duplicate arc");
    }
    auto has = [&](int i, int j) {
      if (symmetric && i > j) std::swap(i, j);
      return seen.count({i, j}) > 0;
    };
    for (const auto& [k, c] : q) {
      const int kk = static_cast<int>(k % n);
      const int jj = static_cast<int>((k / n) % n);
      const int ii = static_cast<int>(k / (static_cast<int64_t>(n) * n));
      if (ii == jj || jj == kk || ii == kk)
        throw std::invalid_argument("QtspInstance: cost key is not a 2-arc");
      if (!has(ii, jj) || !has(jj, kk))
        throw std::invalid_argument("QtspInstance: cost on a missing arc pair");
    }
  }
};

/// Trigonometric constants of the tour spectrum and the tightest LMI choices.
struct SpectralConstants {
  double k_n = 0.0, h_n = 0.0, k2_n = 0.0, h2_n = 0.0;
  double alpha = 0.0, beta = 0.0, alpha2 = 0.0, beta2 = 0.0;
};

inline SpectralConstants spectral_constants(int n) {
  if (n < 3) throw std::invalid_argument("spectral_constants: n must be >= 3");
  SpectralConstants c;
  c.k_n = std::cos(2.0 * std::numbers::pi / n);
  c.h_n = 1.0 - c.k_n;
  c.k2_n = std::cos(2.0 * std::numbers::pi / n) + std::cos(4.0 * std::numbers::pi / n);
  c.h2_n = 2.0 - c.k2_n;
  c.beta = c.k_n;
  c.alpha = c.h_n / n;
  c.beta2 = c.k2_n;
  c.alpha2 = c.h2_n / n;
  return c;
}

/// Node-disjoint cycle decomposition of a permutation-like 0/1 arc assignment.
struct CycleCover {
  std::vector<int> succ;                 // successor per node
  std::vector<std::vector<int>> cycles;  // sorted by smallest member
};

/// Cycle structure of a successor permutation. Each node must have exactly one
/// successor and one predecessor.
inline CycleCover decompose_cover(const std::vector<int>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> indeg(n, 0);
  for (int i = 0; i < n; ++i) {
    if (succ[i] < 0 || succ[i] >= n)
      throw std::invalid_argument("decompose_cover: successor out of range");
    ++indeg[succ[i]];
  }
  for (int i = 0; i < n; ++i)
    if (indeg[i] != 1)
      throw std::invalid_argument("decompose_cover: node degree is not one");
  CycleCover cover;
  cover.succ = succ;
  std::vector<char> seen(n, 0);
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    std::vector<int> cyc;
    int at = i;
    do {
      cyc.push_back(at);
      seen[at] = 1;
      at = succ[at];
    } while (at != i);
    cover.cycles.push_back(std::move(cyc));
  }
  return cover;
}

/// Column layout of a QTSP MILP: [x arcs][y two-arcs][x2 distance-two pairs].
struct QtspVariables {
  std::vector<std::pair<int, int>> arc_list;
  std::vector<std::array<int, 3>> two_arc_list;
  std::vector<std::pair<int, int>> dist2_list;
  std::unordered_map<int64_t, int> x_col, y_col, x2_col;
  int n = 0;

  int64_t pkey(int i, int j) const { return static_cast<int64_t>(i) * n + j; }
  int64_t tkey(int i, int j, int k) const {
    return (static_cast<int64_t>(i) * n + j) * n + k;
  }

  int x(int i, int j) const {
    const auto it = x_col.find(pkey(i, j));
    return it == x_col.end() ? -1 : it->second;
  }
  int y(int i, int j, int k) const {
    const auto it = y_col.find(tkey(i, j, k));
    return it == y_col.end() ? -1 : it->second;
  }
  int x2(int i, int k) const {
    const auto it = x2_col.find(pkey(i, k));
    return it == x2_col.end() ? -1 : it->second;
  }
};

/// A built formulation: the dual-form ISDP model plus its column maps.
struct QtspFormulation {
  QtspInstance inst;  // directed
  SpectralConstants consts;
  QtspVariables vars;
  DualIsdpModel model;
  int level = 1;

  CycleCover cover_at(const std::vector<double>& xhat) const {
    std::vector<int> succ(inst.n, -1);
    for (size_t a = 0; a < vars.arc_list.size(); ++a) {
      if (xhat[a] > 0.5) {
        const auto [i, j] = vars.arc_list[a];
        if (succ[i] != -1)
          throw std::invalid_argument("cover_at: out-degree above one");
        succ[i] = j;
      }
    }
    for (int i = 0; i < inst.n; ++i)
      if (succ[i] < 0) throw std::invalid_argument("cover_at: out-degree zero");
    return decompose_cover(succ);
  }
};

namespace detail {

inline void require_directed(const QtspInstance& inst, const char* where) {
  if (inst.symmetric)
    throw std::invalid_argument(std::string(where) +
                                ": needs a directed instance (reduce symmetric first)");
}

inline std::vector<std::array<int, 3>> two_arcs_of(const QtspInstance& inst) {
  std::vector<std::vector<int>> out(inst.n), in(inst.n);
  for (auto [i, j] : inst.arcs) {
    out[i].push_back(j);
    in[j].push_back(i);
  }
  std::vector<std::array<int, 3>> two;
  for (int j = 0; j < inst.n; ++j)
    for (int i : in[j])
      for (int k : out[j])
        if (k != i) two.push_back({i, j, k});
  std::sort(two.begin(), two.end());
  return two;
}

}  // namespace detail

/// First ISDP formulation: variables (y, X) over F1 with the LMI
/// beta I + alpha J - (X + X^T)/2 >= 0.
inline QtspFormulation build_isdp1(const QtspInstance& inst) {
  detail::require_directed(inst, "build_isdp1");
  inst.validate();
  const int n = inst.n;

  QtspFormulation f;
  f.inst = inst;
  f.consts = spectral_constants(n);
  f.level = 1;
  QtspVariables& v = f.vars;
  v.n = n;
  v.arc_list = inst.arcs;
  std::sort(v.arc_list.begin(), v.arc_list.end());
  v.two_arc_list = detail::two_arcs_of(inst);

  DualIsdpModel& m = f.model;
  const int nx = static_cast<int>(v.arc_list.size());
  const int ny = static_cast<int>(v.two_arc_list.size());
  m.num_vars = nx + ny;
  m.objective.assign(m.num_vars, 0.0);
  m.var_bounds.assign(m.num_vars, Bounds{0.0, 1.0});
  m.integral.assign(m.num_vars, false);

  std::vector<int> outdeg(n, 0), indeg(n, 0);
  for (int a = 0; a < nx; ++a) {
    const auto [i, j] = v.arc_list[a];
    v.x_col[v.pkey(i, j)] = a;
    m.integral[a] = true;
    ++outdeg[i];
    ++indeg[j];
  }
  for (int i = 0; i < n; ++i)
    if (outdeg[i] == 0 || indeg[i] == 0)
      throw std::invalid_argument(
          "build_isdp1: node with zero in- or out-degree; no cycle cover exists");
  for (int t = 0; t < ny; ++t) {
    const auto [i, j, k] = v.two_arc_list[t];
    v.y_col[v.tkey(i, j, k)] = nx + t;
    m.objective[nx + t] = -inst.cost(i, j, k);  // minimization by negation
  }

  // degree rows
  for (int i = 0; i < n; ++i) {
    LinearRow out_row, in_row;
    out_row.sense = in_row.sense = RowSense::kEq;
    out_row.rhs = in_row.rhs = 1.0;
    for (int a = 0; a < nx; ++a) {
      if (v.arc_list[a].first == i) out_row.coeffs.emplace_back(a, 1.0);
      if (v.arc_list[a].second == i) in_row.coeffs.emplace_back(a, 1.0);
    }
    m.linear_rows.push_back(std::move(out_row));
    m.linear_rows.push_back(std::move(in_row));
  }

  // coupling rows per arc: sum_k y_kij = x_ij and sum_k y_ijk = x_ij
  std::vector<LinearRow> into(nx), from(nx);
  for (int a = 0; a < nx; ++a) {
    into[a].sense = from[a].sense = RowSense::kEq;
    into[a].rhs = from[a].rhs = 0.0;
    into[a].coeffs.emplace_back(a, -1.0);
    from[a].coeffs.emplace_back(a, -1.0);
  }
  for (int t = 0; t < ny; ++t) {
    const auto [i, j, k] = v.two_arc_list[t];
    from[v.x(i, j)].coeffs.emplace_back(nx + t, 1.0);  // y_ijk in the sum of (i,j)
    into[v.x(j, k)].coeffs.emplace_back(nx + t, 1.0);  // y_ijk in the sum of (j,k)
  }
  for (int a = 0; a < nx; ++a) {
    m.linear_rows.push_back(std::move(into[a]));
    m.linear_rows.push_back(std::move(from[a]));
  }

  // LMI block
  LmiBlock blk;
  SymMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      c.set(i, j, f.consts.alpha + (i == j ? f.consts.beta : 0.0));
  blk.C = c;
  for (int a = 0; a < nx; ++a) {
    const auto [i, j] = v.arc_list[a];
    SymMatrix e(n);
    e.set(i, j, 0.5);
    blk.coeff.emplace(a, std::move(e));
  }
  m.lmis.push_back(std::move(blk));
  m.objective_is_integral = inst.integral_costs();
  return f;
}

/// Second ISDP formulation: adds the distance-two variables X2 over F2 and the
/// LMI beta2 I + alpha2 J - ((X + X2) + (X + X2)^T)/2 >= 0.
inline QtspFormulation build_isdp2(const QtspInstance& inst) {
  detail::require_directed(inst, "build_isdp2");
  if (inst.n < 5) throw std::invalid_argument("build_isdp2: needs n >= 5");
  QtspFormulation f = build_isdp1(inst);
  f.level = 2;
  QtspVariables& v = f.vars;
  DualIsdpModel& m = f.model;
  const int n = inst.n;
  const int nx = static_cast<int>(v.arc_list.size());

  std::set<std::pair<int, int>> pairs;
  for (const auto& [i, j, k] : v.two_arc_list) pairs.insert({i, k});
  v.dist2_list.assign(pairs.begin(), pairs.end());
  const int n2 = static_cast<int>(v.dist2_list.size());
  const int base = m.num_vars;
  m.num_vars += n2;
  m.objective.resize(m.num_vars, 0.0);
  m.var_bounds.resize(m.num_vars, Bounds{0.0, 1.0});
  m.integral.resize(m.num_vars, false);
  for (int t = 0; t < n2; ++t) {
    const auto [i, k] = v.dist2_list[t];
    v.x2_col[v.pkey(i, k)] = base + t;
    m.integral[base + t] = true;
  }

  // degree rows of X2
  for (int i = 0; i < n; ++i) {
    LinearRow out_row, in_row;
    out_row.sense = in_row.sense = RowSense::kEq;
    out_row.rhs = in_row.rhs = 1.0;
    for (int t = 0; t < n2; ++t) {
      if (v.dist2_list[t].first == i) out_row.coeffs.emplace_back(base + t, 1.0);
      if (v.dist2_list[t].second == i) in_row.coeffs.emplace_back(base + t, 1.0);
    }
    if (out_row.coeffs.empty() || in_row.coeffs.empty())
      throw std::invalid_argument("build_isdp2: node without distance-two pair");
    m.linear_rows.push_back(std::move(out_row));
    m.linear_rows.push_back(std::move(in_row));
  }

  // coupling x2_ik = sum_j y_ijk
  std::vector<LinearRow> rows(n2);
  for (int t = 0; t < n2; ++t) {
    rows[t].sense = RowSense::kEq;
    rows[t].rhs = 0.0;
    rows[t].coeffs.emplace_back(base + t, -1.0);
  }
  for (size_t t = 0; t < v.two_arc_list.size(); ++t) {
    const auto [i, j, k] = v.two_arc_list[t];
    rows[v.x2(i, k) - base].coeffs.emplace_back(nx + static_cast<int>(t), 1.0);
  }
  for (int t = 0; t < n2; ++t) m.linear_rows.push_back(std::move(rows[t]));

  // second LMI block over X + X2
  LmiBlock blk;
  SymMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      c.set(i, j, f.consts.alpha2 + (i == j ? f.consts.beta2 : 0.0));
  blk.C = c;
  for (int a = 0; a < nx; ++a) {
    const auto [i, j] = v.arc_list[a];
    SymMatrix e(n);
    e.set(i, j, 0.5);
    blk.coeff.emplace(a, std::move(e));
  }
  for (int t = 0; t < n2; ++t) {
    const auto [i, k] = v.dist2_list[t];
    SymMatrix e(n);
    e.set(i, k, 0.5);
    blk.coeff.emplace(base + t, std::move(e));
  }
  m.lmis.push_back(std::move(blk));
  return f;
}

// ---- cut constructors ----

namespace detail {

/// Eigenvector of the cycle class: n - |S| on S, -|S| elsewhere.
inline std::vector<long long> class_vector(int n, const std::vector<int>& cycle) {
  std::vector<long long> v(n, -static_cast<long long>(cycle.size()));
  for (int i : cycle) v[i] = n - static_cast<long long>(cycle.size());
  return v;
}

}  // namespace detail

/// Eq.(19)-type cuts: <U_l, X> <= floor(<U_l, beta I + alpha J>) per subtour.
inline std::vector<LinearCut> eigencut_isdp1(const QtspFormulation& f,
                                             const CycleCover& cover) {
  std::vector<LinearCut> cuts;
  if (cover.cycles.size() < 2) return cuts;
  const int n = f.inst.n;
  for (const auto& cyc : cover.cycles) {
    const auto v = detail::class_vector(n, cyc);
    std::vector<std::pair<int, double>> terms;
    for (size_t a = 0; a < f.vars.arc_list.size(); ++a) {
      const auto [i, j] = f.vars.arc_list[a];
      terms.emplace_back(static_cast<int>(a), static_cast<double>(v[i] * v[j]));
    }
    const double s = static_cast<double>(cyc.size());
    const double rhs = guarded_floor(f.consts.beta * n * s * (n - s));
    cuts.push_back(make_cut(std::move(terms), rhs, CutProvenance::kCgRounded));
  }
  return cuts;
}

/// Eq.(20)-type cuts: <U_l, X + X2> <= floor(<U_l, beta2 I + alpha2 J>).
inline std::vector<LinearCut> eigencut_isdp2(const QtspFormulation& f,
                                             const CycleCover& cover) {
  if (f.level < 2)
    throw std::invalid_argument("eigencut_isdp2: needs the level-2 formulation");
  std::vector<LinearCut> cuts;
  if (cover.cycles.size() < 2) return cuts;
  const int n = f.inst.n;
  for (const auto& cyc : cover.cycles) {
    const auto v = detail::class_vector(n, cyc);
    std::vector<std::pair<int, double>> terms;
    for (size_t a = 0; a < f.vars.arc_list.size(); ++a) {
      const auto [i, j] = f.vars.arc_list[a];
      terms.emplace_back(static_cast<int>(a), static_cast<double>(v[i] * v[j]));
    }
    for (size_t t = 0; t < f.vars.dist2_list.size(); ++t) {
      const auto [i, k] = f.vars.dist2_list[t];
      terms.emplace_back(f.vars.x2(i, k), static_cast<double>(v[i] * v[k]));
    }
    const double s = static_cast<double>(cyc.size());
    const double rhs = guarded_floor(f.consts.beta2 * n * s * (n - s));
    cuts.push_back(make_cut(std::move(terms), rhs, CutProvenance::kCgRounded));
  }
  return cuts;
}

enum class SecType { kI, kII, kIII, kIV, kV, kTriple };

/// Subtour elimination constructors (Table-2 family plus the triple cuts).
/// Emits cuts per subtour of the cover; callers filter by violation.
inline std::vector<LinearCut> sec_cuts(const QtspFormulation& f, const CycleCover& cover,
                                       const std::set<SecType>& types) {
  std::vector<LinearCut> cuts;
  if (cover.cycles.size() < 2) return cuts;
  const int n = f.inst.n;
  const QtspVariables& v = f.vars;

  auto in_set = [n](const std::vector<int>& cyc) {
    std::vector<char> mem(n, 0);
    for (int i : cyc) mem[i] = 1;
    return mem;
  };

  for (const auto& cyc : cover.cycles) {
    const int s = static_cast<int>(cyc.size());
    if (s >= n) continue;
    const auto mem = in_set(cyc);

    if (types.count(SecType::kI)) {
      std::vector<std::pair<int, double>> terms;
      for (size_t a = 0; a < v.arc_list.size(); ++a) {
        const auto [i, j] = v.arc_list[a];
        if (mem[i] && mem[j]) terms.emplace_back(static_cast<int>(a), 1.0);
      }
      if (!terms.empty())
        cuts.push_back(make_cut(std::move(terms), s - 1.0, CutProvenance::kTable2Type));
    }

    if (types.count(SecType::kII)) {
      std::vector<std::pair<int, double>> terms;
      for (size_t a = 0; a < v.arc_list.size(); ++a) {
        const auto [i, j] = v.arc_list[a];
        if (mem[i] && !mem[j]) terms.emplace_back(static_cast<int>(a), -1.0);
      }
      if (terms.empty())
        cuts.push_back(make_infeasibility_cut(CutProvenance::kTable2Type));
      else
        cuts.push_back(make_cut(std::move(terms), -1.0, CutProvenance::kTable2Type));
    }

    if (types.count(SecType::kIV) && n >= 5) {
      // pairs consecutive or at distance two on the subtour
      std::set<std::pair<int, int>> pairs;
      for (int t = 0; t < s; ++t) {
        for (int d : {1, 2}) {
          int a = cyc[t], b = cyc[(t + d) % s];
          if (a == b) continue;
          pairs.insert({std::min(a, b), std::max(a, b)});
        }
      }
      for (auto [i, j] : pairs) {
        std::vector<std::pair<int, double>> terms;
        if (v.x(i, j) >= 0) terms.emplace_back(v.x(i, j), 1.0);
        if (v.x(j, i) >= 0) terms.emplace_back(v.x(j, i), 1.0);
        for (int k = 0; k < n; ++k) {
          if (v.y(i, k, j) >= 0) terms.emplace_back(v.y(i, k, j), 1.0);
          if (v.y(j, k, i) >= 0) terms.emplace_back(v.y(j, k, i), 1.0);
        }
        if (!terms.empty())
          cuts.push_back(make_cut(std::move(terms), 1.0, CutProvenance::kTable2Type));
      }
    }

    if (types.count(SecType::kV) && 2 * s < n) {
      std::vector<std::pair<int, double>> terms;
      for (size_t a = 0; a < v.arc_list.size(); ++a) {
        const auto [i, j] = v.arc_list[a];
        if (mem[i] && mem[j]) terms.emplace_back(static_cast<int>(a), 1.0);
      }
      for (size_t t = 0; t < v.two_arc_list.size(); ++t) {
        const auto [i, k, j] = v.two_arc_list[t];
        if (mem[i] && mem[j] && !mem[k])
          terms.emplace_back(static_cast<int>(v.arc_list.size() + t), 1.0);
      }
      if (!terms.empty())
        cuts.push_back(make_cut(std::move(terms), s - 1.0, CutProvenance::kTable2Type));
    }

    if (types.count(SecType::kTriple) && s == 3) {
      // y_ijk + y_kij <= x_ij for all six orderings of the triple
      const std::array<int, 3> t3{cyc[0], cyc[1], cyc[2]};
      const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                              {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (const auto& pm : perm) {
        const int i = t3[pm[0]], j = t3[pm[1]], k = t3[pm[2]];
        std::vector<std::pair<int, double>> terms;
        if (v.y(i, j, k) >= 0) terms.emplace_back(v.y(i, j, k), 1.0);
        if (v.y(k, i, j) >= 0) terms.emplace_back(v.y(k, i, j), 1.0);
        if (v.x(i, j) >= 0) terms.emplace_back(v.x(i, j), -1.0);
        if (terms.empty()) continue;
        cuts.push_back(make_cut(std::move(terms), 0.0, CutProvenance::kTable2Type));
      }
    }
  }

  if (types.count(SecType::kIII)) {
    // merged cut over the whole partition
    std::vector<char> cls(n, 0);
    for (size_t l = 0; l < cover.cycles.size(); ++l)
      for (int i : cover.cycles[l]) cls[i] = static_cast<char>(l);
    std::vector<std::pair<int, double>> terms;
    for (size_t a = 0; a < v.arc_list.size(); ++a) {
      const auto [i, j] = v.arc_list[a];
      terms.emplace_back(static_cast<int>(a), cls[i] == cls[j] ? 1.0 : -1.0);
    }
    const double k = static_cast<double>(cover.cycles.size());
    cuts.push_back(make_cut(std::move(terms), n - 2.0 * k, CutProvenance::kTable2Type));
  }
  return cuts;
}

/// Plain eigenvalue cut (KT scheme) for the level-1 LMI at an integer point.
inline LinearCut kt_cut(const QtspFormulation& f, const std::vector<double>& xhat) {
  const SymMatrix z = f.model.lmis[0].slack_at(xhat);
  const EigenResult eig = min_eig(z);
  const auto& d = eig.vector;
  std::vector<std::pair<int, double>> terms;
  for (size_t a = 0; a < f.vars.arc_list.size(); ++a) {
    const auto [i, j] = f.vars.arc_list[a];
    const double c = d[i] * d[j];
    if (c != 0.0) terms.emplace_back(static_cast<int>(a), c);
  }
  double sum = 0.0;
  for (double vi : d) sum += vi;
  const double rhs = f.consts.beta + f.consts.alpha * sum * sum;
  return make_cut(std::move(terms), rhs, CutProvenance::kEigenvalue);
}

// ---- separation settings ----

enum class QtspSetting { kKt, kCg1, kCg2, kSecSimple, kSec, kSecCg };

inline QtspSetting parse_setting(const std::string& id) {
  if (id == "kt") return QtspSetting::kKt;
  if (id == "cg1") return QtspSetting::kCg1;
  if (id == "cg2") return QtspSetting::kCg2;
  if (id == "sec-simple") return QtspSetting::kSecSimple;
  if (id == "sec") return QtspSetting::kSec;
  if (id == "sec-cg") return QtspSetting::kSecCg;
  throw std::invalid_argument("unknown separation setting '" + id + "'");
}

inline const char* setting_name(QtspSetting s) {
  switch (s) {
    case QtspSetting::kKt: return "kt";
    case QtspSetting::kCg1: return "cg1";
    case QtspSetting::kCg2: return "cg2";
    case QtspSetting::kSecSimple: return "sec-simple";
    case QtspSetting::kSec: return "sec";
    case QtspSetting::kSecCg: return "sec-cg";
  }
  return "?";
}

/// Root formulation level per setting: CG2 and SEC-CG need the X2 columns.
inline int setting_level(QtspSetting s) {
  return (s == QtspSetting::kCg2 || s == QtspSetting::kSecCg) ? 2 : 1;
}

/// Candidate cuts of the setting at an integer point; only violated ones are
/// returned (the kernel enforces strict violation on every lazy cut).
inline std::vector<LinearCut> setting_cuts(const QtspFormulation& f, QtspSetting setting,
                                           const std::vector<double>& xhat) {
  const CycleCover cover = f.cover_at(xhat);
  if (cover.cycles.size() < 2) return {};
  std::vector<LinearCut> cand;
  switch (setting) {
    case QtspSetting::kKt:
      cand.push_back(kt_cut(f, xhat));
      break;
    case QtspSetting::kCg1:
      cand = eigencut_isdp1(f, cover);
      break;
    case QtspSetting::kCg2: {
      cand = eigencut_isdp1(f, cover);
      auto more = eigencut_isdp2(f, cover);
      cand.insert(cand.end(), more.begin(), more.end());
      break;
    }
    case QtspSetting::kSecSimple:
      cand = sec_cuts(f, cover, {SecType::kI});
      break;
    case QtspSetting::kSec:
    case QtspSetting::kSecCg: {
      cand = sec_cuts(f, cover, {SecType::kI, SecType::kIV, SecType::kTriple});
      // type V only for subtours smaller than n/2 and above size two
      for (auto& cut : sec_cuts(f, cover, {SecType::kV}))
        cand.push_back(std::move(cut));
      if (setting == QtspSetting::kSecCg) {
        for (auto& cut : eigencut_isdp1(f, cover)) cand.push_back(std::move(cut));
        for (auto& cut : eigencut_isdp2(f, cover)) cand.push_back(std::move(cut));
      }
      break;
    }
  }
  std::vector<LinearCut> violated;
  for (auto& cut : cand)
    if (cut.violation_at(xhat) > kCutViolationTol) violated.push_back(std::move(cut));
  return violated;
}

// ---- symmetric reduction ----

/// Directed expansion of a symmetric instance plus the trivial tour back-map
/// (a directed tour's node order reads directly as the undirected solution).
struct SymmetricReduction {
  QtspInstance directed;

  std::vector<int> fold_tour(const std::vector<int>& directed_tour) const {
    return directed_tour;
  }
};

inline SymmetricReduction symmetric_reduction(const QtspInstance& inst) {
  if (!inst.symmetric)
    throw std::invalid_argument("symmetric_reduction: instance is not symmetric");
  inst.validate();
  SymmetricReduction red;
  QtspInstance& d = red.directed;
  d.n = inst.n;
  d.symmetric = false;
  for (auto [i, j] : inst.arcs) {
    d.arcs.emplace_back(i, j);
    d.arcs.emplace_back(j, i);
  }
  std::sort(d.arcs.begin(), d.arcs.end());
  for (const auto& [key, c] : inst.q) {
    const int k = static_cast<int>(key % inst.n);
    const int j = static_cast<int>((key / inst.n) % inst.n);
    const int i = static_cast<int>(key / (static_cast<int64_t>(inst.n) * inst.n));
    d.set_cost(i, j, k, c);
    d.set_cost(k, j, i, c);
  }
  return red;
}

// ---- brute force oracle ----

struct BruteForceResult {
  bool feasible = false;
  double value = 0.0;
  std::vector<int> tour;
};

/// Exact optimum by permutation enumeration with a fixed start node.
inline BruteForceResult brute_force_qtsp(const QtspInstance& inst) {
  QtspInstance dir = inst;
  if (inst.symmetric) {
    if (inst.n > 11) throw std::invalid_argument("brute_force_qtsp: n > 11 (symmetric)");
    dir = symmetric_reduction(inst).directed;
  } else {
    if (inst.n > 10) throw std::invalid_argument("brute_force_qtsp: n > 10 (directed)");
  }
  const int n = dir.n;
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (auto [i, j] : dir.arcs) adj[i][j] = 1;

  BruteForceResult best;
  std::vector<int> perm(n);
  perm[0] = 0;
  std::vector<char> used(n, 0);
  used[0] = 1;

  std::function<void(int)> rec = [&](int depth) {
    if (depth == n) {
      if (!adj[perm[n - 1]][perm[0]]) return;
      double cost = 0.0;
      for (int t = 0; t < n; ++t)
        cost += dir.cost(perm[t], perm[(t + 1) % n], perm[(t + 2) % n]);
      if (!best.feasible || cost < best.value) {
        best.feasible = true;
        best.value = cost;
        best.tour = perm;
      }
      return;
    }
    for (int next = 1; next < n; ++next) {
      if (used[next] || !adj[perm[depth - 1]][next]) continue;
      perm[depth] = next;
      used[next] = 1;
      rec(depth + 1);
      used[next] = 0;
    }
  };
  rec(1);
  return best;
}

// ---- end-to-end solve ----

struct QtspRun {
  IsdpSolveResult::Status status = IsdpSolveResult::Status::kInfeasible;
  double objective = 0.0;  // minimization sense
  double best_bound = 0.0;
  std::vector<int> tour;
  SolveStats stats;
  long cuts_added = 0;
  std::vector<CutLogRecord> cut_log;
};

inline QtspRun solve_qtsp(const QtspInstance& inst, QtspSetting setting,
                          const SolveLimits& limits = {}) {
  QtspInstance directed = inst;
  if (inst.symmetric) directed = symmetric_reduction(inst).directed;

  const QtspFormulation f =
      setting_level(setting) == 2 ? build_isdp2(directed) : build_isdp1(directed);

  BcConfig cfg;
  cfg.limits = limits;
  IsdpSolveResult r = solve_isdp_with_cuts(
      f.model, cfg, [&](const std::vector<double>& xhat) {
        return setting_cuts(f, setting, xhat);
      });

  QtspRun run;
  run.status = r.status;
  run.stats = r.stats;
  run.cuts_added = static_cast<long>(r.cuts.size());
  run.cut_log = std::move(r.cut_log);
  if (r.status == IsdpSolveResult::Status::kInfeasible) return run;
  run.best_bound = -r.bound;  // re-negated: lower bound of the minimum
  if (!r.x.empty()) {
    run.objective = -r.value;
    if (f.model.objective_is_integral) run.objective = std::round(run.objective);
    const CycleCover cover = f.cover_at(r.x);
    if (cover.cycles.size() == 1) run.tour = cover.cycles[0];
  }
  return run;
}

}  // namespace isdp
