#include "isdp/conic.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

using namespace isdp;

namespace {

DualIsdpModel scalar_model(double c, double a, Bounds b = {-3.0, 3.0}) {
  DualIsdpModel m;
  m.num_vars = 1;
  m.objective = {1.0};
  m.var_bounds = {b};
  m.integral = {true};
  LmiBlock blk;
  blk.C = SymMatrix::from_rows({{c}});
  blk.coeff.emplace(0, SymMatrix::from_rows({{a}}));
  m.lmis.push_back(std::move(blk));
  return m;
}

}  // namespace

TEST_CASE("cut_from_dual_matrix basics") {
  auto m = scalar_model(1.5, 1.0);
  auto u1 = SymMatrix::from_rows({{1.0}});

  auto cut = cut_from_dual_matrix(m, u1, /*round_rhs=*/true);
  REQUIRE(cut.terms.size() == 1);
  CHECK(cut.terms[0].first == 0);
  CHECK(cut.terms[0].second == 1.0);
  CHECK(cut.rhs == 1.0);
  CHECK(cut.provenance == CutProvenance::kCgRounded);

  auto unrounded = cut_from_dual_matrix(m, u1, false);
  CHECK(unrounded.rhs == 1.5);
  CHECK(unrounded.provenance == CutProvenance::kEigenvalue);

  SymMatrix zero(1);
  CHECK_THROWS_AS(cut_from_dual_matrix(m, zero, false), std::invalid_argument);

  auto not_psd = SymMatrix::from_rows({{-1.0}});
  CHECK_THROWS_AS(cut_from_dual_matrix(m, not_psd, false), std::invalid_argument);

  auto frac = scalar_model(1.5, 0.5);
  CHECK_THROWS_AS(cut_from_dual_matrix(frac, u1, true), std::invalid_argument);
}

TEST_CASE("eigenvalue cut from a rank-1 dual matrix separates the violated point") {
  // C = diag(2, -1), A1 = E11: Z(x) = diag(2 - x, -1) is never PSD, and
  // U = dd^T from the min eigenvector gives the Eq.(10)-style cut.
  DualIsdpModel m;
  m.num_vars = 1;
  m.objective = {1.0};
  m.var_bounds = {{-5.0, 5.0}};
  m.integral = {true};
  LmiBlock blk;
  blk.C = SymMatrix::from_rows({{2.0, 0.0}, {0.0, -1.0}});
  blk.coeff.emplace(0, SymMatrix::from_rows({{1.0, 0.0}, {0.0, 0.0}}));
  m.lmis.push_back(blk);

  std::vector<double> xhat{3.0};
  const SymMatrix z = m.lmis[0].slack_at(xhat);
  const auto eig = min_eig(z);
  REQUIRE(eig.value < 0.0);
  const auto u = SymMatrix::outer(eig.vector);
  const auto cut = cut_from_dual_matrix(m, u, false);
  CHECK(cut.violation_at(xhat) > 0.0);
  // Rayleigh identity: violation equals -lambda_min
  CHECK(cut.violation_at(xhat) == Catch::Approx(-eig.value).margin(1e-9));
}

TEST_CASE("floor_coefficient_cut") {
  auto m = scalar_model(2.9, 1.7, Bounds{0.0, 6.0});
  auto u = SymMatrix::from_rows({{1.0}});
  auto cut = floor_coefficient_cut(m, u);
  REQUIRE(cut.terms.size() == 1);
  CHECK(cut.terms[0].second == 1.0);
  CHECK(cut.rhs == 2.0);

  auto neg = scalar_model(2.9, 1.7, Bounds{-1.0, 6.0});
  CHECK_THROWS_AS(floor_coefficient_cut(neg, u), std::invalid_argument);

  // integer <A_i,U> case coincides with the rounded CG cut
  auto mi = scalar_model(2.9, 2.0, Bounds{0.0, 6.0});
  auto a_cut = floor_coefficient_cut(mi, u);
  auto b_cut = cut_from_dual_matrix(mi, u, true);
  CHECK(a_cut.terms == b_cut.terms);
  CHECK(a_cut.rhs == b_cut.rhs);
}

TEST_CASE("floored cut is valid at every integer point certified by U") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> ai(-2, 2);
  std::uniform_real_distribution<double> cr(-1.0, 4.0);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 2, mvars = 2;
    DualIsdpModel m;
    m.num_vars = mvars;
    m.objective.assign(mvars, 0.0);
    m.var_bounds.assign(mvars, Bounds{0.0, 4.0});
    m.integral.assign(mvars, true);
    LmiBlock blk;
    std::vector<std::vector<double>> c(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) c[i][j] = c[j][i] = cr(gen);
    blk.C = SymMatrix::from_rows(c);
    for (int v = 0; v < mvars; ++v) {
      SymMatrix a(n);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a.set(i, j, ai(gen));
      blk.coeff.emplace(v, a);
    }
    m.lmis.push_back(blk);

    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    std::vector<double> w{ur(gen), ur(gen)};
    SymMatrix u = SymMatrix::outer(w);  // PSD by construction

    LinearCut cut;
    try {
      cut = floor_coefficient_cut(m, u);
    } catch (const std::invalid_argument&) {
      continue;  // all coefficients floored to zero
    }
    for (int x0 = 0; x0 <= 4; ++x0)
      for (int x1 = 0; x1 <= 4; ++x1) {
        std::vector<double> x{static_cast<double>(x0), static_cast<double>(x1)};
        const SymMatrix z = m.lmis[0].slack_at(x);
        if (trace_inner(z, u) >= 0.0) {
          CHECK(cut.lhs_at(x) <= cut.rhs + 1e-9);
        }
      }
  }
}

TEST_CASE("strengthened_floor") {
  CHECK(strengthened_floor({1, 1, 1}, 2.5, Lattice::kBinaryBox) == 2.0);
  CHECK(strengthened_floor({2, 2}, 3.0, Lattice::kBinaryBox) == 2.0);
  CHECK(strengthened_floor({3}, 7.0, Lattice::kAllIntegers) == 6.0);
  CHECK_THROWS_AS(strengthened_floor({0, 0}, 1.0, Lattice::kAllIntegers),
                  std::invalid_argument);

  // infeasible binary box
  CHECK(strengthened_floor({1, 2}, -0.5, Lattice::kBinaryBox) == -kInfinity);

  // oracle passthrough
  auto oracle = [](const std::vector<long long>&, double d) { return d - 0.25; };
  CHECK(strengthened_floor({1}, 2.0, Lattice::kOracle, oracle) == 1.75);
}

TEST_CASE("strengthened_floor properties against brute force") {
  std::mt19937_64 gen(31337);
  std::uniform_int_distribution<long long> ci(-5, 5);
  std::uniform_real_distribution<double> dd(-8.0, 12.0);
  for (int rep = 0; rep < 200; ++rep) {
    const int mvars = 1 + static_cast<int>(gen() % 12);
    std::vector<long long> c(mvars);
    bool nonzero = false;
    for (auto& v : c) {
      v = ci(gen);
      nonzero |= (v != 0);
    }
    if (!nonzero) c[0] = 1;
    const double d = dd(gen);

    const double all_ints = strengthened_floor(c, d, Lattice::kAllIntegers);
    CHECK(all_ints <= d + 1e-9);

    const double bin = strengthened_floor(c, d, Lattice::kBinaryBox);
    double brute = -kInfinity;
    for (int mask = 0; mask < (1 << mvars); ++mask) {
      long long s = 0;
      for (int i = 0; i < mvars; ++i)
        if (mask & (1 << i)) s += c[i];
      if (static_cast<double>(s) <= d && static_cast<double>(s) > brute)
        brute = static_cast<double>(s);
    }
    CHECK(bin == brute);
    if (bin != -kInfinity) {
      CHECK(bin <= all_ints + 1e-9);  // binary box is a subset of the integers
      CHECK(bin <= d + 1e-9);
    }
  }
}

TEST_CASE("tdi closure on hand examples") {
  auto scalar = scalar_model(1.5, 1.0);
  auto cl = tdi_closure(scalar);
  REQUIRE(cl.B.size() == 2);
  CHECK(cl.B[0] == std::vector<long long>{0});
  CHECK(cl.d[0] == 0);
  CHECK(cl.B[1] == std::vector<long long>{1});
  CHECK(cl.d[1] == 1);
  CHECK(cl.assumes_tdi_and_slater);

  DualIsdpModel m2;
  m2.num_vars = 2;
  m2.objective = {1.0, 1.0};
  m2.var_bounds = {{-2, 2}, {-2, 2}};
  m2.integral = {true, true};
  LmiBlock blk;
  blk.C = SymMatrix::identity(2);
  blk.coeff.emplace(0, SymMatrix::sym_unit(2, 0, 0));
  blk.coeff.emplace(1, SymMatrix::sym_unit(2, 1, 1));
  m2.lmis.push_back(blk);
  auto c2 = tdi_closure(m2);
  REQUIRE(c2.B.size() == 4);
  // masks: {}, {1}, {2}, {1,2}
  CHECK(c2.B[1] == std::vector<long long>{1, 0});
  CHECK(c2.d[1] == 1);
  CHECK(c2.B[2] == std::vector<long long>{0, 1});
  CHECK(c2.d[2] == 1);
  CHECK(c2.B[3] == std::vector<long long>{1, 1});
  CHECK(c2.d[3] == 2);

  // full-set row with integer C: d equals <C, J_n> exactly
  CHECK(c2.d[3] == static_cast<long long>(trace_inner(blk.C, SymMatrix::ones(2))));
}

TEST_CASE("every closure row re-derives as a CG cut from U = 1_S 1_S^T") {
  std::mt19937_64 gen(4242);
  std::uniform_int_distribution<int> ai(-3, 3);
  DualIsdpModel m;
  m.num_vars = 3;
  m.objective = {1, 0, -1};
  m.var_bounds.assign(3, Bounds{-5, 5});
  m.integral.assign(3, true);
  LmiBlock blk;
  const int n = 4;
  std::vector<std::vector<double>> c(n, std::vector<double>(n));
  std::uniform_real_distribution<double> cr(-2.0, 2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) c[i][j] = c[j][i] = cr(gen);
  blk.C = SymMatrix::from_rows(c);
  for (int v = 0; v < 3; ++v) {
    SymMatrix a(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) a.set(i, j, ai(gen));
    blk.coeff.emplace(v, a);
  }
  m.lmis.push_back(blk);

  const auto cl = tdi_closure(m);
  for (size_t r = 1; r < cl.B.size(); ++r) {
    std::vector<double> ind(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (cl.subsets[r] & (1u << i)) ind[i] = 1.0;
    const auto u = SymMatrix::outer(ind);
    const auto cut = [&]() -> std::optional<LinearCut> {
      try {
        return cut_from_dual_matrix(m, u, true);
      } catch (const std::invalid_argument&) {
        return std::nullopt;  // all-zero coefficient rows are not cuts
      }
    }();
    if (!cut) continue;
    std::vector<double> dense(3, 0.0);
    for (auto [col, v] : cut->terms) dense[col] = v;
    for (int v = 0; v < 3; ++v) CHECK(dense[v] == static_cast<double>(cl.B[r][v]));
    CHECK(cut->rhs == static_cast<double>(cl.d[r]));
  }
}

TEST_CASE("tdi closure guards") {
  auto frac = scalar_model(1.5, 0.5);
  CHECK_THROWS_AS(tdi_closure(frac), std::invalid_argument);
}

TEST_CASE("one-sided dirichlet approximation") {
  // exact cases: the fractional-part bound holds at the returned p
  for (auto [d, n] : std::vector<std::pair<double, long long>>{
           {0.5, 2}, {1.0 / 3.0, 3}, {std::sqrt(2.0), 10}}) {
    const long long p = one_sided_dirichlet(d, n);
    CHECK(p >= 1);
    const double pd = p * d;
    CHECK(pd - std::floor(pd) <= 1.0 / n + 1e-15);
  }

  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> ud(0.0, 10.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double d = ud(gen);
    const long long n = 2 + static_cast<long long>(gen() % 30);
    const long long p = one_sided_dirichlet(d, n);
    const double pd = p * d;
    CHECK(pd - std::floor(pd) <= 1.0 / n + 1e-15);
  }
  CHECK_THROWS_AS(one_sided_dirichlet(0.5, 1), std::invalid_argument);
}
