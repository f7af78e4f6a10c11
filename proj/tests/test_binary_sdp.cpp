#include "isdp/binary_sdp.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <random>

using namespace isdp;

namespace {

std::vector<double> pack_entries(const BinSymMatrix& x) {
  std::vector<double> v(sym_entry_count(x.n));
  for (int i = 0; i < x.n; ++i)
    for (int j = i; j < x.n; ++j) v[sym_entry_index(x.n, i, j)] = x(i, j);
  return v;
}

BinSymMatrix random_binary(std::mt19937_64& gen, int n, double density) {
  BinSymMatrix x(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) x.set(i, j, u(gen) < density ? 1 : 0);
  return x;
}

// ground-truth generator: disjoint clique sum, PSD by construction
BinSymMatrix random_clique_sum(std::mt19937_64& gen, int n,
                               std::vector<std::vector<int>>* truth = nullptr) {
  BinSymMatrix x(n);
  std::vector<int> nodes(n);
  for (int i = 0; i < n; ++i) nodes[i] = i;
  std::shuffle(nodes.begin(), nodes.end(), gen);
  size_t at = 0;
  while (at < nodes.size()) {
    size_t len = 1 + gen() % 3;
    len = std::min(len, nodes.size() - at);
    if (gen() % 4 == 0) {  // leave some nodes out of every clique
      ++at;
      continue;
    }
    std::vector<int> clique(nodes.begin() + at, nodes.begin() + at + len);
    std::sort(clique.begin(), clique.end());
    for (int a : clique)
      for (int b : clique) x.set(a, b, 1);
    if (truth) truth->push_back(clique);
    at += len;
  }
  return x;
}

}  // namespace

TEST_CASE("separation certificates on the displayed matrices") {
  BinSymMatrix id4(4);
  for (int i = 0; i < 4; ++i) id4.set(i, i, 1);
  CHECK(separate_binary_psd(id4).kind == CertificateKind::kPsd);

  BinSymMatrix dom(3);
  dom.set(0, 1, 1);  // x11 = 0, x12 = 1
  auto cert = separate_binary_psd(dom);
  REQUIRE(cert.kind == CertificateKind::kDominatedDiagonal);
  CHECK(cert.i == 0);
  CHECK(cert.j == 1);
  CHECK(cert.U(0, 0) == 1.0);
  CHECK(cert.U(0, 1) == -1.0);
  CHECK(cert.U(1, 1) == 1.0);

  auto conf = BinSymMatrix::from_rows({{1, 1, 1}, {1, 1, 0}, {1, 0, 1}});
  cert = separate_binary_psd(conf);
  REQUIRE(cert.kind == CertificateKind::kConflictingVertex);
  CHECK(cert.i == 0);
  CHECK(cert.j == 1);
  CHECK(cert.k == 2);
  // U = (e_j + e_k - e_i)(...)^T and <U, X> = -1
  CHECK(trace_inner(cert.U, conf.to_sym()) == -1.0);
}

TEST_CASE("dominated diagonal wins over conflicting vertex in scan order") {
  // node 0 has a conflict, node 1 has a dominated diagonal; row-major scan
  // hits the i=0 clique test only after checking x00 = 1, so build a matrix
  // where the first violation in scan order is the dominated diagonal.
  auto x = BinSymMatrix::from_rows({{0, 1, 0}, {1, 1, 0}, {0, 0, 1}});
  auto cert = separate_binary_psd(x);
  CHECK(cert.kind == CertificateKind::kDominatedDiagonal);
}

TEST_CASE("equivalence with the eigenvalue test and unit violation") {
  std::mt19937_64 gen(2718);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 2 + static_cast<int>(gen() % 11);
    const auto x = random_binary(gen, n, 0.35);
    const auto cert = separate_binary_psd(x);
    const double lmin = min_eig(x.to_sym()).value;
    if (cert.kind == CertificateKind::kPsd) {
      CHECK(lmin >= -1e-9);
    } else {
      CHECK(lmin < -1e-9);
      CHECK(trace_inner(cert.U, x.to_sym()) <= -1.0);
    }
  }
}

TEST_CASE("clique decomposition") {
  BinSymMatrix id3(3);
  for (int i = 0; i < 3; ++i) id3.set(i, i, 1);
  auto cl = clique_decomposition(id3);
  REQUIRE(cl.size() == 3);
  CHECK(cl[0] == std::vector<int>{0});

  auto block = BinSymMatrix::from_rows({{1, 1, 0}, {1, 1, 0}, {0, 0, 0}});
  cl = clique_decomposition(block);
  REQUIRE(cl.size() == 1);
  CHECK(cl[0] == std::vector<int>{0, 1});

  auto bad = BinSymMatrix::from_rows({{0, 1}, {1, 0}});
  CHECK_THROWS_AS(clique_decomposition(bad), std::invalid_argument);

  std::mt19937_64 gen(55);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::vector<int>> truth;
    auto x = random_clique_sum(gen, 10, &truth);
    auto got = clique_decomposition(x);
    auto canon = [](std::vector<std::vector<int>> v) {
      for (auto& c : v) std::sort(c.begin(), c.end());
      std::sort(v.begin(), v.end());
      return v;
    };
    CHECK(canon(got) == canon(truth));

    // exact round-trip
    BinSymMatrix rebuilt(x.n);
    for (const auto& c : got)
      for (int a : c)
        for (int b : c) rebuilt.set(a, b, 1);
    CHECK(rebuilt.a == x.a);
  }
}

TEST_CASE("elliptope strengthening (triangle cut)") {
  auto conf = BinSymMatrix::from_rows({{1, 1, 1}, {1, 1, 0}, {1, 0, 1}});
  auto cert = separate_binary_psd(conf);
  auto cut = strengthen_elliptope(cert, 3);

  // violated by the generating matrix: lhs = 2 > 1
  CHECK(cut.lhs_at(pack_entries(conf)) == 2.0);
  CHECK(cut.rhs == 1.0);

  // valid on all 2^3 unit-diagonal binary PSD patterns
  for (int mask = 0; mask < 8; ++mask) {
    BinSymMatrix x(3);
    for (int i = 0; i < 3; ++i) x.set(i, i, 1);
    x.set(0, 1, (mask >> 0) & 1);
    x.set(0, 2, (mask >> 1) & 1);
    x.set(1, 2, (mask >> 2) & 1);
    if (separate_binary_psd(x).kind != CertificateKind::kPsd) continue;
    CHECK(cut.lhs_at(pack_entries(x)) <= cut.rhs + 1e-12);
  }

  PsdCertificate wrong;
  wrong.kind = CertificateKind::kDominatedDiagonal;
  CHECK_THROWS_AS(strengthen_elliptope(wrong, 3), std::invalid_argument);
}

TEST_CASE("trace-simplex strengthening") {
  auto conf = BinSymMatrix::from_rows(
      {{1, 1, 1, 0}, {1, 1, 0, 0}, {1, 0, 1, 0}, {0, 0, 0, 1}});
  auto cert = separate_binary_psd(conf);
  REQUIRE(cert.kind == CertificateKind::kConflictingVertex);

  const int n = 4;
  auto cut3 = strengthen_trace_simplex(cert, 3, n);
  CHECK(cut3.rhs == -4.0);  // scaled 2*ceil(3/2)
  auto cut4 = strengthen_trace_simplex(cert, 4, n);
  CHECK(cut4.rhs == -4.0);  // even K: rounding changes nothing

  // validity: every binary PSD X with tr(X) = K satisfies the cut, n <= 5
  for (int nn = 3; nn <= 5; ++nn) {
    auto c2 = separate_binary_psd(
        BinSymMatrix::from_rows({{1, 1, 1}, {1, 1, 0}, {1, 0, 1}}));
    for (int k_trace = 1; k_trace <= nn; ++k_trace) {
      auto cut = strengthen_trace_simplex(c2, k_trace, nn);
      const int pairs = nn * (nn - 1) / 2;
      for (int mask = 0; mask < (1 << (nn + pairs)); ++mask) {
        BinSymMatrix x(nn);
        int bit = 0;
        for (int i = 0; i < nn; ++i) x.set(i, i, (mask >> bit++) & 1);
        for (int i = 0; i < nn; ++i)
          for (int j = i + 1; j < nn; ++j) x.set(i, j, (mask >> bit++) & 1);
        int tr = 0;
        for (int i = 0; i < nn; ++i) tr += x(i, i);
        if (tr != k_trace) continue;
        if (separate_binary_psd(x).kind != CertificateKind::kPsd) continue;
        CHECK(cut.lhs_at(pack_entries(x)) <= cut.rhs + 1e-12);
      }
    }
  }
}
