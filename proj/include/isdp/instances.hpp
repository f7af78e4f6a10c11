#pragma once

// Instance generation (reload classes, angle costs on TSPLIB points and grid
// graphs), TSPLIB EUC_2D parsing, and the native JSON instance format.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "isdp/qtsp.hpp"
#include "isdp/rng.hpp"

namespace isdp {

// ---- feasibility probes ----

namespace detail {

/// Bipartite perfect matching (Kuhn): does the arc set admit a cycle cover?
inline bool has_cycle_cover(int n, const std::vector<std::pair<int, int>>& arcs) {
  std::vector<std::vector<int>> out(n);
  for (auto [i, j] : arcs) out[i].push_back(j);
  std::vector<int> match_col(n, -1);
  std::vector<char> used;
  std::function<bool(int)> try_row = [&](int i) -> bool {
    for (int j : out[i]) {
      if (used[j]) continue;
      used[j] = 1;
      if (match_col[j] < 0 || try_row(match_col[j])) {
        match_col[j] = i;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < n; ++i) {
    used.assign(n, 0);
    if (!try_row(i)) return false;
  }
  return true;
}

/// Directed Hamiltonian cycle probe by backtracking with a node-expansion cap;
/// a capped search counts as "no tour" (deterministic either way).
inline bool has_tour_backtracking(int n, const std::vector<std::pair<int, int>>& arcs,
                                  long long cap = 4000000) {
  std::vector<std::vector<int>> out(n);
  std::vector<int> indeg_left(n, 0);
  for (auto [i, j] : arcs) {
    out[i].push_back(j);
    ++indeg_left[j];
  }
  for (auto& v : out) std::sort(v.begin(), v.end());
  std::vector<char> used(n, 0);
  used[0] = 1;
  long long expansions = 0;
  std::function<bool(int, int)> rec = [&](int at, int depth) -> bool {
    if (++expansions > cap) return false;
    if (depth == n) {
      for (int j : out[at])
        if (j == 0) return true;
      return false;
    }
    for (int j : out[at]) {
      if (used[j]) continue;
      used[j] = 1;
      if (rec(j, depth + 1)) return true;
      used[j] = 0;
    }
    return false;
  };
  return rec(0, 1);
}

}  // namespace detail

// ---- reload instances ----

struct ReloadSpec {
  int n = 10;
  double p = 1.0;        // arc probability
  int colors = 5;        // |L|
  int reload_class = 1;  // 1: unit costs, 2: uniform {1..10}
  uint64_t seed = 0;
  bool ensure_tour = false;  // resample until a Hamiltonian tour exists
  bool resample = true;      // retry with a fresh round when infeasible
};

/// Random reload instance: arcs present with probability p, arc colors uniform
/// on [colors], q_ijk = r(color(i,j), color(j,k)). Identical spec regenerates
/// an identical instance.
inline QtspInstance gen_reload(const ReloadSpec& spec) {
  if (spec.n < 3 || spec.colors < 1 || (spec.reload_class != 1 && spec.reload_class != 2))
    throw std::invalid_argument("gen_reload: invalid spec");
  for (uint64_t round = 0;; ++round) {
    Rng arc_rng = Rng::stream(spec.seed, "arcs", round);
    Rng color_rng = Rng::stream(spec.seed, "colors", round);
    Rng cost_rng = Rng::stream(spec.seed, "costs", round);

    QtspInstance inst;
    inst.n = spec.n;
    inst.symmetric = false;
    std::vector<std::vector<int>> color(spec.n, std::vector<int>(spec.n, -1));
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.n; ++j) {
        if (i == j) continue;
        const bool present = arc_rng.uniform01() < spec.p;
        const int col = static_cast<int>(color_rng.below(spec.colors));
        if (present) {
          inst.arcs.emplace_back(i, j);
          color[i][j] = col;
        }
      }

    std::vector<std::vector<double>> r(spec.colors, std::vector<double>(spec.colors, 0.0));
    for (int s = 0; s < spec.colors; ++s)
      for (int t = 0; t < spec.colors; ++t) {
        if (s == t) continue;
        const double value =
            (spec.reload_class == 1) ? 1.0 : static_cast<double>(cost_rng.range(1, 10));
        r[s][t] = value;
      }

    for (const auto& [i, j, k] : detail::two_arcs_of(inst))
      inst.set_cost(i, j, k, r[color[i][j]][color[j][k]]);

    const bool cover_ok = detail::has_cycle_cover(inst.n, inst.arcs);
    const bool tour_ok =
        !spec.ensure_tour || (cover_ok && detail::has_tour_backtracking(inst.n, inst.arcs));
    if (cover_ok && tour_ok) return inst;
    if (!spec.resample)
      throw std::runtime_error("gen_reload: sampled graph admits no cycle cover");
  }
}

// ---- angle costs ----

using Point = std::pair<double, double>;

struct EuclideanPoints {
  std::vector<Point> pts;

  void validate() const {
    if (pts.size() < 3)
      throw std::invalid_argument("EuclideanPoints: need at least three points");
    for (size_t a = 0; a < pts.size(); ++a)
      for (size_t b = a + 1; b < pts.size(); ++b)
        if (std::abs(pts[a].first - pts[b].first) <= 1e-9 &&
            std::abs(pts[a].second - pts[b].second) <= 1e-9)
          throw std::invalid_argument("EuclideanPoints: duplicate coordinates");
  }
};

/// Turn cost ceil(10 (1 - angle(vi,vj,vk)/pi)) with the cosine clamped to
/// [-1,1]; values within 1e-9 of an integer are snapped before the ceiling.
inline int angle_cost(const Point& vi, const Point& vj, const Point& vk) {
  const double ux = vi.first - vj.first, uy = vi.second - vj.second;
  const double wx = vk.first - vj.first, wy = vk.second - vj.second;
  const double nu = std::hypot(ux, uy), nw = std::hypot(wx, wy);
  if (nu <= 1e-12 || nw <= 1e-12)
    throw std::invalid_argument("angle_cost: coincident points");
  double c = (ux * wx + uy * wy) / (nu * nw);
  c = std::clamp(c, -1.0, 1.0);
  const double raw = 10.0 * (1.0 - std::acos(c) / std::numbers::pi);
  return static_cast<int>(guarded_ceil(raw));
}

/// Complete symmetric instance on the points with 2-edge angle costs.
inline QtspInstance build_angle_instance(const EuclideanPoints& points) {
  points.validate();
  const int n = static_cast<int>(points.pts.size());
  QtspInstance inst;
  inst.n = n;
  inst.symmetric = true;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) inst.arcs.emplace_back(i, j);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      for (int k = i + 1; k < n; ++k) {
        if (k == j) continue;
        inst.set_cost(i, j, k, angle_cost(points.pts[i], points.pts[j], points.pts[k]));
      }
    }
  return inst;
}

// ---- TSPLIB (EUC_2D subset) ----

inline EuclideanPoints parse_tsplib(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int dimension = -1;
  bool euc2d = false;
  bool in_coords = false;
  EuclideanPoints out;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    const auto b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    std::string t = trim(line);
    if (t.empty()) continue;
    if (!in_coords) {
      std::string upper = t;
      for (char& c : upper) c = static_cast<char>(toupper(c));
      if (upper.rfind("DIMENSION", 0) == 0) {
        dimension = std::stoi(t.substr(t.find_last_of(": ") + 1));
      } else if (upper.rfind("EDGE_WEIGHT_TYPE", 0) == 0) {
        if (upper.find("EUC_2D") == std::string::npos)
          throw std::invalid_argument("parse_tsplib: unsupported EDGE_WEIGHT_TYPE (" + t +
                                      ")");
        euc2d = true;
      } else if (upper.rfind("NODE_COORD_SECTION", 0) == 0) {
        if (!euc2d)
          throw std::invalid_argument("parse_tsplib: NODE_COORD_SECTION without EUC_2D");
        in_coords = true;
      }
      continue;
    }
    if (t == "EOF") break;
    std::istringstream ls(t);
    long id;
    double x, y;
    if (!(ls >> id >> x >> y))
      throw std::invalid_argument("parse_tsplib: malformed coordinate line '" + t + "'");
    out.pts.emplace_back(x, y);
  }
  if (!in_coords) throw std::invalid_argument("parse_tsplib: no NODE_COORD_SECTION");
  if (dimension >= 0 && static_cast<int>(out.pts.size()) != dimension)
    throw std::invalid_argument("parse_tsplib: DIMENSION does not match coordinate count");
  out.validate();
  return out;
}

inline std::string write_tsplib(const EuclideanPoints& points, const std::string& name) {
  std::ostringstream os;
  os << "NAME: " << name << "\nTYPE: TSP\nDIMENSION: " << points.pts.size()
     << "\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n";
  os.precision(17);
  for (size_t i = 0; i < points.pts.size(); ++i)
    os << (i + 1) << " " << points.pts[i].first << " " << points.pts[i].second << "\n";
  os << "EOF\n";
  return os.str();
}

// ---- grid instances ----

/// Seeded random connected subset of the N1 x N2 lattice with 4-neighbour
/// adjacency and angle costs (straight 0, turn 5; U-turns cannot occur).
inline QtspInstance gen_grid(int n1, int n2, int n_target, uint64_t seed,
                             bool ensure_tour = false) {
  if (n1 < 2 || n2 < 2) throw std::invalid_argument("gen_grid: lattice must be >= 2x2");
  if (n_target < 3 || n_target > n1 * n2)
    throw std::invalid_argument("gen_grid: cannot reach n_target connected cells");
  for (uint64_t round = 0;; ++round) {
    Rng rng = Rng::stream(seed, "grid-cells", round);
    std::vector<char> in(n1 * n2, 0);
    auto cell = [&](int x, int y) { return y * n1 + x; };
    std::vector<int> region;
    {
      const int sx = static_cast<int>(rng.below(n1));
      const int sy = static_cast<int>(rng.below(n2));
      in[cell(sx, sy)] = 1;
      region.push_back(cell(sx, sy));
    }
    while (static_cast<int>(region.size()) < n_target) {
      std::vector<int> frontier;
      for (int y = 0; y < n2; ++y)
        for (int x = 0; x < n1; ++x) {
          if (in[cell(x, y)]) continue;
          const bool touches = (x > 0 && in[cell(x - 1, y)]) ||
                               (x + 1 < n1 && in[cell(x + 1, y)]) ||
                               (y > 0 && in[cell(x, y - 1)]) ||
                               (y + 1 < n2 && in[cell(x, y + 1)]);
          if (touches) frontier.push_back(cell(x, y));
        }
      const int pick = frontier[static_cast<size_t>(rng.below(frontier.size()))];
      in[pick] = 1;
      region.push_back(pick);
    }
    std::sort(region.begin(), region.end());

    EuclideanPoints pts;
    std::vector<int> index(n1 * n2, -1);
    for (size_t t = 0; t < region.size(); ++t) {
      index[region[t]] = static_cast<int>(t);
      pts.pts.emplace_back(static_cast<double>(region[t] % n1),
                           static_cast<double>(region[t] / n1));
    }

    QtspInstance inst;
    inst.n = n_target;
    inst.symmetric = true;
    for (int c : region) {
      const int x = c % n1, y = c / n1;
      if (x + 1 < n1 && in[cell(x + 1, y)])
        inst.arcs.emplace_back(std::min(index[c], index[cell(x + 1, y)]),
                               std::max(index[c], index[cell(x + 1, y)]));
      if (y + 1 < n2 && in[cell(x, y + 1)])
        inst.arcs.emplace_back(std::min(index[c], index[cell(x, y + 1)]),
                               std::max(index[c], index[cell(x, y + 1)]));
    }
    std::sort(inst.arcs.begin(), inst.arcs.end());

    // q over 2-edges <i, j, k>: both {i,j} and {j,k} edges of the grid
    std::vector<std::vector<int>> nb(n_target);
    for (auto [i, j] : inst.arcs) {
      nb[i].push_back(j);
      nb[j].push_back(i);
    }
    for (int j = 0; j < n_target; ++j)
      for (int i : nb[j])
        for (int k : nb[j])
          if (i < k) inst.set_cost(i, j, k, angle_cost(pts.pts[i], pts.pts[j], pts.pts[k]));

    if (!ensure_tour) return inst;
    std::vector<std::pair<int, int>> both;
    for (auto [i, j] : inst.arcs) {
      both.emplace_back(i, j);
      both.emplace_back(j, i);
    }
    if (detail::has_tour_backtracking(n_target, both)) return inst;
  }
}

// ---- native JSON instance format ----

inline nlohmann::json instance_to_json(const QtspInstance& inst) {
  nlohmann::json j;
  j["n"] = inst.n;
  j["symmetric"] = inst.symmetric;
  auto arcs = inst.arcs;
  std::sort(arcs.begin(), arcs.end());
  nlohmann::json ja = nlohmann::json::array();
  for (auto [a, b] : arcs) ja.push_back({a + 1, b + 1});
  j["arcs"] = std::move(ja);
  std::vector<std::array<int64_t, 3>> keys;
  for (const auto& [k, c] : inst.q) {
    const int kk = static_cast<int>(k % inst.n);
    const int jj = static_cast<int>((k / inst.n) % inst.n);
    const int ii = static_cast<int>(k / (static_cast<int64_t>(inst.n) * inst.n));
    keys.push_back({ii, jj, kk});
  }
  std::sort(keys.begin(), keys.end());
  nlohmann::json jq = nlohmann::json::array();
  for (const auto& t : keys) {
    const double c = inst.cost(static_cast<int>(t[0]), static_cast<int>(t[1]),
                               static_cast<int>(t[2]));
    jq.push_back({t[0] + 1, t[1] + 1, t[2] + 1, c});
  }
  j["q"] = std::move(jq);
  return j;
}

inline QtspInstance instance_from_json(const nlohmann::json& j) {
  QtspInstance inst;
  inst.n = j.at("n").get<int>();
  inst.symmetric = j.at("symmetric").get<bool>();
  for (const auto& a : j.at("arcs"))
    inst.arcs.emplace_back(a.at(0).get<int>() - 1, a.at(1).get<int>() - 1);
  for (const auto& t : j.at("q")) {
    const int i = t.at(0).get<int>() - 1;
    const int jj = t.at(1).get<int>() - 1;
    const int k = t.at(2).get<int>() - 1;
    const double c = t.at(3).get<double>();
    if (inst.symmetric) {
      const auto prior = inst.q.find(inst.key(i, jj, k));
      if (prior != inst.q.end() && prior->second != c)
        throw std::invalid_argument(
            "instance_from_json: asymmetric cost on a symmetric instance");
    }
    inst.set_cost(i, jj, k, c);
  }
  inst.validate();
  return inst;
}

inline std::string instance_to_string(const QtspInstance& inst) {
  return instance_to_json(inst).dump(1);
}

}  // namespace isdp
