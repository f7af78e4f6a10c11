#include "isdp/qtsp.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <numeric>
#include <random>

using namespace isdp;

namespace {

QtspInstance complete_digraph(int n, double cost = 0.0) {
  QtspInstance inst;
  inst.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) inst.arcs.emplace_back(i, j);
  if (cost != 0.0)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (i != j && j != k && i != k) inst.set_cost(i, j, k, cost);
  return inst;
}

QtspInstance random_complete(std::mt19937_64& gen, int n, int maxc = 10) {
  QtspInstance inst = complete_digraph(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (i != j && j != k && i != k)
          inst.set_cost(i, j, k, 1.0 + double(gen() % maxc));
  return inst;
}

/// MILP point of a cycle cover (cycles of length >= 3): x, y, x2 as implied.
std::vector<double> point_of(const QtspFormulation& f, const std::vector<int>& succ) {
  std::vector<double> x(f.model.num_vars, 0.0);
  const int n = f.inst.n;
  for (int i = 0; i < n; ++i) {
    const int j = succ[i];
    const int k = succ[j];
    const int xc = f.vars.x(i, j);
    if (xc < 0) throw std::logic_error("point_of: arc outside instance");
    x[xc] = 1.0;
    const int yc = f.vars.y(i, j, k);
    if (yc < 0) throw std::logic_error("point_of: two-arc outside instance");
    x[yc] = 1.0;
    if (f.level >= 2) {
      const int c2 = f.vars.x2(i, k);
      if (c2 >= 0) x[c2] = 1.0;
    }
  }
  return x;
}

/// X as a plain matrix from a successor map.
Matrix x_matrix(const std::vector<int>& succ) {
  const int n = static_cast<int>(succ.size());
  Matrix x(n, n);
  for (int i = 0; i < n; ++i) x(i, succ[i]) = 1.0;
  return x;
}

/// Z = beta I + alpha J - (X + X^T)/2 for any permutation matrix.
SymMatrix theorem_matrix(const std::vector<int>& succ, double alpha, double beta) {
  const int n = static_cast<int>(succ.size());
  SymMatrix z(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) z.set(i, j, alpha + (i == j ? beta : 0.0));
  for (int i = 0; i < n; ++i) z.add(i, succ[i], -0.5);
  return z;
}

SymMatrix theorem2_matrix(const std::vector<int>& succ, double alpha2, double beta2) {
  const int n = static_cast<int>(succ.size());
  SymMatrix z(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) z.set(i, j, alpha2 + (i == j ? beta2 : 0.0));
  for (int i = 0; i < n; ++i) {
    z.add(i, succ[i], -0.5);
    z.add(i, succ[succ[i]], -0.5);
  }
  return z;
}

void enumerate_covers(int n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> succ(n, -1);
  std::vector<char> used(n, 0);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      // cycles of length >= 2 only (no fixed points by construction below)
      fn(succ);
      return;
    }
    for (int j = 0; j < n; ++j) {
      if (used[j] || j == i) continue;
      used[j] = 1;
      succ[i] = j;
      rec(i + 1);
      used[j] = 0;
    }
  };
  rec(0);
}

bool is_single_cycle(const std::vector<int>& succ) {
  int at = 0, steps = 0;
  do {
    at = succ[at];
    ++steps;
  } while (at != 0);
  return steps == static_cast<int>(succ.size());
}

}  // namespace

TEST_CASE("spectral constants") {
  auto c4 = spectral_constants(4);
  CHECK(c4.k_n == Catch::Approx(0.0).margin(1e-15));
  CHECK(c4.h_n == Catch::Approx(1.0).margin(1e-15));
  CHECK(c4.k2_n == Catch::Approx(-1.0).margin(1e-15));
  CHECK(c4.h2_n == Catch::Approx(3.0).margin(1e-15));

  auto c6 = spectral_constants(6);
  CHECK(c6.k_n == Catch::Approx(0.5).margin(1e-15));
  CHECK(c6.k2_n == Catch::Approx(0.0).margin(1e-12));

  auto c5 = spectral_constants(5);
  CHECK(c5.k_n == Catch::Approx((std::sqrt(5.0) - 1.0) / 4.0).margin(1e-12));

  CHECK_THROWS_AS(spectral_constants(2), std::invalid_argument);
}

TEST_CASE("build_isdp1 column counts and tour feasibility") {
  auto inst = complete_digraph(5);
  auto f = build_isdp1(inst);
  CHECK(f.vars.arc_list.size() == 20);
  CHECK(f.vars.two_arc_list.size() == 60);
  CHECK(f.model.num_vars == 80);

  // every tour of K5 is PSD-feasible for the level-1 LMI
  std::vector<int> rest{1, 2, 3, 4};
  int tours = 0;
  do {
    std::vector<int> succ(5);
    succ[0] = rest[0];
    for (int t = 0; t < 3; ++t) succ[rest[t]] = rest[t + 1];
    succ[rest[3]] = 0;
    const auto x = point_of(f, succ);
    CHECK(min_eig(f.model.lmis[0].slack_at(x)).value >= -1e-9);
    ++tours;
  } while (std::next_permutation(rest.begin(), rest.end()));
  CHECK(tours == 24);

  // two disjoint 3-cycles on 6 nodes: lambda_min = beta - 1
  auto f6 = build_isdp1(complete_digraph(6));
  std::vector<int> two{1, 2, 0, 4, 5, 3};
  const auto x6 = point_of(f6, two);
  CHECK(min_eig(f6.model.lmis[0].slack_at(x6)).value ==
        Catch::Approx(f6.consts.beta - 1.0).margin(1e-9));
}

TEST_CASE("build_isdp2: distance-two block and tour spectrum") {
  auto f = build_isdp2(complete_digraph(6));
  std::vector<int> tour{1, 2, 3, 4, 5, 0};
  const auto x = point_of(f, tour);
  CHECK(min_eig(f.model.lmis[0].slack_at(x)).value >= -1e-9);
  CHECK(min_eig(f.model.lmis[1].slack_at(x)).value >= -1e-9);

  std::vector<int> two{1, 2, 0, 4, 5, 3};
  const auto x2 = point_of(f, two);
  CHECK(min_eig(f.model.lmis[1].slack_at(x2)).value < -1e-6);

  // spectrum of ((X+X2)+(X+X2)^T)/2 for a 6-tour is {cos(2 pi j/6)+cos(4 pi j/6)}
  SymMatrix s(6);
  for (int i = 0; i < 6; ++i) {
    s.add(i, tour[i], 0.5);
    s.add(i, tour[tour[i]], 0.5);
  }
  std::vector<double> values;
  Matrix vecs;
  sym_eigen(s, values, vecs);
  std::vector<double> expect;
  for (int j = 1; j <= 6; ++j)
    expect.push_back(std::cos(2 * std::numbers::pi * j / 6.0) +
                     std::cos(4 * std::numbers::pi * j / 6.0));
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < 6; ++i) CHECK(values[i] == Catch::Approx(expect[i]).margin(1e-9));

  CHECK_THROWS_AS(build_isdp2(complete_digraph(4)), std::invalid_argument);
}

TEST_CASE("decompose_cover") {
  auto c1 = decompose_cover({1, 2, 3, 4, 0});
  REQUIRE(c1.cycles.size() == 1);
  CHECK(c1.cycles[0].size() == 5);

  auto c2 = decompose_cover({1, 0, 3, 4, 2});
  REQUIRE(c2.cycles.size() == 2);
  CHECK(c2.cycles[0] == std::vector<int>{0, 1});
  CHECK(c2.cycles[1] == std::vector<int>{2, 3, 4});

  CHECK_THROWS_AS(decompose_cover({1, 1, 2}), std::invalid_argument);

  // random permutations of 12 elements: orbit sizes found independently per node
  std::mt19937_64 gen(99);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<int> p(12);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), gen);
    const auto cover = decompose_cover(p);
    for (const auto& cyc : cover.cycles) {
      for (int node : cyc) {
        int at = node, len = 0;
        do {
          at = p[at];
          ++len;
        } while (at != node);
        CHECK(len == static_cast<int>(cyc.size()));
      }
    }
    size_t total = 0;
    for (const auto& cyc : cover.cycles) total += cyc.size();
    CHECK(total == 12);
  }
}

TEST_CASE("eigenvector cuts of the level-1 LMI") {
  auto f = build_isdp1(complete_digraph(6));
  std::vector<int> two{1, 2, 0, 4, 5, 3};
  const auto cover = decompose_cover(two);
  const auto cuts = eigencut_isdp1(f, cover);
  REQUIRE(cuts.size() == 2);

  // hand values for S = {0,1,2}: rhs floor(0.5 * 54) = 27, lhs at the point 54
  CHECK(cuts[0].rhs == 27.0);
  const auto x = point_of(f, two);
  CHECK(cuts[0].lhs_at(x) == 54.0);
  CHECK(cuts[0].violation_at(x) > 0.0);

  // every tour of K6 satisfies both cuts
  std::vector<int> rest{1, 2, 3, 4, 5};
  do {
    std::vector<int> succ(6);
    succ[0] = rest[0];
    for (int t = 0; t < 4; ++t) succ[rest[t]] = rest[t + 1];
    succ[rest[4]] = 0;
    const auto xt = point_of(f, succ);
    for (const auto& cut : cuts) CHECK(cut.lhs_at(xt) <= cut.rhs + 1e-9);
  } while (std::next_permutation(rest.begin(), rest.end()));

  // single cycle: no cuts
  CHECK(eigencut_isdp1(f, decompose_cover({1, 2, 3, 4, 5, 0})).empty());
}

TEST_CASE("eigenvector cuts of the level-2 LMI") {
  auto f = build_isdp2(complete_digraph(6));
  std::vector<int> two{1, 2, 0, 4, 5, 3};
  const auto cover = decompose_cover(two);
  const auto cuts = eigencut_isdp2(f, cover);
  REQUIRE(cuts.size() == 2);
  const auto x = point_of(f, two);
  for (const auto& cut : cuts) CHECK(cut.violation_at(x) > 0.0);

  std::vector<int> rest{1, 2, 3, 4, 5};
  do {
    std::vector<int> succ(6);
    succ[0] = rest[0];
    for (int t = 0; t < 4; ++t) succ[rest[t]] = rest[t + 1];
    succ[rest[4]] = 0;
    const auto xt = point_of(f, succ);
    for (const auto& cut : cuts) CHECK(cut.lhs_at(xt) <= cut.rhs + 1e-9);
  } while (std::next_permutation(rest.begin(), rest.end()));
}

TEST_CASE("subtour elimination constructors") {
  auto f = build_isdp2(complete_digraph(7));
  std::vector<int> cover_perm{1, 2, 0, 4, 5, 6, 3};  // cycles {0,1,2}, {3,4,5,6}
  const auto cover = decompose_cover(cover_perm);
  const auto x = point_of(f, cover_perm);

  auto type1 = sec_cuts(f, cover, {SecType::kI});
  REQUIRE(type1.size() == 2);
  CHECK(type1[0].rhs == 2.0);  // |S| - 1 for {0,1,2}
  CHECK(type1[0].violation_at(x) > 0.0);

  auto type5 = sec_cuts(f, cover, {SecType::kV});
  REQUIRE(type5.size() == 1);  // only |S| = 3 < 7/2
  CHECK(type5[0].rhs == 2.0);
  CHECK(type5[0].violation_at(x) > 0.0);

  auto type4 = sec_cuts(f, cover, {SecType::kIV});
  CHECK(!type4.empty());
  auto triple = sec_cuts(f, cover, {SecType::kTriple});
  CHECK(triple.size() == 6);

  auto type2 = sec_cuts(f, cover, {SecType::kII});
  REQUIRE(type2.size() == 2);
  CHECK(type2[0].rhs == -1.0);
  CHECK(type2[0].violation_at(x) > 0.0);

  auto type3 = sec_cuts(f, cover, {SecType::kIII});
  REQUIRE(type3.size() == 1);
  CHECK(type3[0].rhs == 7.0 - 2.0 * 2.0);
  CHECK(type3[0].violation_at(x) > 0.0);

  // all constructors hold at every Hamiltonian tour of K6
  auto f6 = build_isdp2(complete_digraph(6));
  std::vector<int> perm6{1, 2, 0, 4, 5, 3};
  const auto cover6 = decompose_cover(perm6);
  std::vector<LinearCut> all;
  for (auto t : {SecType::kI, SecType::kII, SecType::kIII, SecType::kIV, SecType::kV,
                 SecType::kTriple})
    for (auto& cut : sec_cuts(f6, cover6, {t})) all.push_back(std::move(cut));
  std::vector<int> rest{1, 2, 3, 4, 5};
  do {
    std::vector<int> succ(6);
    succ[0] = rest[0];
    for (int t = 0; t < 4; ++t) succ[rest[t]] = rest[t + 1];
    succ[rest[4]] = 0;
    const auto xt = point_of(f6, succ);
    for (const auto& cut : all) CHECK(cut.lhs_at(xt) <= cut.rhs + 1e-9);
  } while (std::next_permutation(rest.begin(), rest.end()));
}

TEST_CASE("theorem certificates over all covers (n = 5, 6)") {
  for (int n : {5, 6}) {
    const auto c = spectral_constants(n);
    long covers = 0, hams = 0;
    enumerate_covers(n, [&](const std::vector<int>& succ) {
      ++covers;
      const bool ham = is_single_cycle(succ);
      hams += ham;
      const SymMatrix z = theorem_matrix(succ, c.alpha, c.beta);
      const double lmin = min_eig(z).value;
      CHECK((lmin >= -1e-9) == ham);
      const SymMatrix z2 = theorem2_matrix(succ, c.alpha2, c.beta2);
      const double lmin2 = min_eig(z2).value;
      CHECK((lmin2 >= -1e-9) == ham);
      if (!ham) {
        // eigenvector identity of the class vectors
        const auto cover = decompose_cover(succ);
        for (const auto& cyc : cover.cycles) {
          std::vector<double> v(n, -double(cyc.size()));
          for (int i : cyc) v[i] = double(n) - double(cyc.size());
          const auto zv = z.multiply(v);
          for (int i = 0; i < n; ++i)
            CHECK(std::abs(zv[i] - (c.beta - 1.0) * v[i]) <= 1e-9);
        }
      }
    });
    CHECK(hams == [](int nn) {
      long f = 1;
      for (int t = 2; t < nn; ++t) f *= t;
      return f;
    }(n));
  }
}

TEST_CASE("symmetric reduction") {
  // undirected 5-cycle with unit cost on every 2-edge of the cycle
  QtspInstance ring;
  ring.n = 5;
  ring.symmetric = true;
  for (int i = 0; i < 5; ++i)
    ring.arcs.emplace_back(std::min(i, (i + 1) % 5), std::max(i, (i + 1) % 5));
  std::sort(ring.arcs.begin(), ring.arcs.end());
  for (int j = 0; j < 5; ++j)
    ring.set_cost((j + 4) % 5, j, (j + 1) % 5, 1.0);
  auto red = symmetric_reduction(ring);
  CHECK(red.directed.arcs.size() == 10);
  auto bf_dir = brute_force_qtsp(red.directed);
  auto bf_sym = brute_force_qtsp(ring);
  REQUIRE(bf_dir.feasible);
  CHECK(bf_dir.value == bf_sym.value);
  CHECK(bf_sym.value == 5.0);

  // random symmetric instances match the directed brute force after reduction
  std::mt19937_64 gen(313);
  for (int rep = 0; rep < 5; ++rep) {
    QtspInstance inst;
    inst.n = 7;
    inst.symmetric = true;
    for (int i = 0; i < 7; ++i)
      for (int j = i + 1; j < 7; ++j) inst.arcs.emplace_back(i, j);
    for (int j = 0; j < 7; ++j)
      for (int i = 0; i < 7; ++i)
        for (int k = i + 1; k < 7; ++k)
          if (i != j && k != j) inst.set_cost(i, j, k, 1.0 + double(gen() % 9));
    auto direct = brute_force_qtsp(symmetric_reduction(inst).directed);
    auto sym = brute_force_qtsp(inst);
    CHECK(direct.value == sym.value);
  }

  CHECK_THROWS_AS(symmetric_reduction(complete_digraph(4)), std::invalid_argument);
}

TEST_CASE("brute force oracle") {
  auto unit = complete_digraph(3, 1.0);
  auto r = brute_force_qtsp(unit);
  REQUIRE(r.feasible);
  CHECK(r.value == 3.0);

  auto zero = complete_digraph(5);
  CHECK(brute_force_qtsp(zero).value == 0.0);
}

TEST_CASE("all six settings agree with brute force on random instances") {
  std::mt19937_64 gen(2026);
  const std::vector<QtspSetting> settings{QtspSetting::kKt,        QtspSetting::kCg1,
                                          QtspSetting::kCg2,       QtspSetting::kSecSimple,
                                          QtspSetting::kSec,       QtspSetting::kSecCg};
  for (int rep = 0; rep < 4; ++rep) {
    const int n = 6 + (rep % 3);
    auto inst = random_complete(gen, n);
    const auto truth = brute_force_qtsp(inst);
    REQUIRE(truth.feasible);
    for (auto s : settings) {
      auto run = solve_qtsp(inst, s);
      REQUIRE(run.status == IsdpSolveResult::Status::kOptimal);
      CHECK(run.objective == truth.value);
      REQUIRE(run.tour.size() == static_cast<size_t>(n));
    }
  }
}

TEST_CASE("disconnected instance is infeasible under every setting") {
  // two complete directed triangles, no arcs between them
  QtspInstance inst;
  inst.n = 6;
  for (int base : {0, 3})
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) inst.arcs.emplace_back(base + i, base + j);
  for (auto s : {QtspSetting::kKt, QtspSetting::kCg1, QtspSetting::kSecSimple,
                 QtspSetting::kSec}) {
    auto run = solve_qtsp(inst, s);
    CHECK(run.status == IsdpSolveResult::Status::kInfeasible);
  }
}
