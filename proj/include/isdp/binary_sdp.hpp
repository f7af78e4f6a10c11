#pragma once

// Combinatorial PSD separation for symmetric binary matrices: dominated
// diagonal / conflicting vertex certificates, clique decomposition, and the
// CG strengthenings over the elliptope and the trace simplex.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "isdp/conic.hpp"
#include "isdp/linalg.hpp"

namespace isdp {

struct BinSymMatrix {
  int n = 0;
  std::vector<uint8_t> a;  // row-major 0/1

  BinSymMatrix() = default;
  explicit BinSymMatrix(int order) : n(order), a(static_cast<size_t>(order) * order, 0) {}

  static BinSymMatrix from_rows(const std::vector<std::vector<int>>& rows) {
    const int n = static_cast<int>(rows.size());
    BinSymMatrix m(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw std::invalid_argument("BinSymMatrix: ragged rows");
      for (int j = 0; j < n; ++j) {
        const int v = rows[i][j];
        if (v != 0 && v != 1) throw std::invalid_argument("BinSymMatrix: entries must be 0/1");
        m.a[static_cast<size_t>(i) * n + j] = static_cast<uint8_t>(v);
      }
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (m(i, j) != m(j, i)) throw std::invalid_argument("BinSymMatrix: not symmetric");
    return m;
  }

  uint8_t operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
  void set(int i, int j, int v) {
    a[static_cast<size_t>(i) * n + j] = static_cast<uint8_t>(v);
    a[static_cast<size_t>(j) * n + i] = static_cast<uint8_t>(v);
  }

  SymMatrix to_sym() const {
    SymMatrix s(n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) s.set(i, j, (*this)(i, j));
    return s;
  }
};

enum class CertificateKind { kPsd, kDominatedDiagonal, kConflictingVertex };

/// Outcome of the combinatorial PSD test. For the non-PSD kinds, U is the
/// rank-1 integer dual matrix with <U, X> < 0 at the queried matrix.
struct PsdCertificate {
  CertificateKind kind = CertificateKind::kPsd;
  int i = -1, j = -1, k = -1;  // 0-based witnesses
  SymMatrix U;
};

/// Scan order is fixed (row-major i, first violating j, lexicographic (j,k))
/// so certificates are deterministic.
inline PsdCertificate separate_binary_psd(const BinSymMatrix& x) {
  const int n = x.n;
  for (int i = 0; i < n; ++i) {
    if (x(i, i) == 0) {
      for (int j = 0; j < n; ++j) {
        if (j == i || x(i, j) == 0) continue;
        std::vector<double> v(n, 0.0);
        v[i] = 1.0;
        v[j] = -1.0;
        return PsdCertificate{CertificateKind::kDominatedDiagonal, i, j, -1,
                              SymMatrix::outer(v)};
      }
    } else {
      std::vector<int> d;
      for (int j = 0; j < n; ++j)
        if (x(i, j) == 1 && j != i) d.push_back(j);
      for (size_t p = 0; p < d.size(); ++p)
        for (size_t q = p + 1; q < d.size(); ++q) {
          if (x(d[p], d[q]) == 0) {
            std::vector<double> v(n, 0.0);
            v[d[p]] = 1.0;
            v[d[q]] = 1.0;
            v[i] = -1.0;
            return PsdCertificate{CertificateKind::kConflictingVertex, i, d[p], d[q],
                                  SymMatrix::outer(v)};
          }
        }
    }
  }
  return PsdCertificate{};
}

/// Disjoint cliques D with X = sum_D 1_D 1_D^T. Requires a PSD input.
inline std::vector<std::vector<int>> clique_decomposition(const BinSymMatrix& x) {
  if (separate_binary_psd(x).kind != CertificateKind::kPsd)
    throw std::invalid_argument("clique_decomposition: input is not PSD");
  const int n = x.n;
  std::vector<char> seen(n, 0);
  std::vector<std::vector<int>> cliques;
  for (int i = 0; i < n; ++i) {
    if (seen[i] || x(i, i) == 0) continue;
    std::vector<int> d;
    for (int j = 0; j < n; ++j)
      if (x(i, j) == 1) {
        d.push_back(j);
        seen[j] = 1;
      }
    cliques.push_back(std::move(d));
  }
  return cliques;
}

/// Packed upper-triangle column index for matrix-variable entries (i <= j).
inline int sym_entry_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

inline int sym_entry_count(int n) { return n * (n + 1) / 2; }

/// Triangle cut of the elliptope strengthening (unit diagonal models):
///   x_ik + x_ij - x_jk <= 1  over packed X entries.
inline LinearCut strengthen_elliptope(const PsdCertificate& cert, int n) {
  if (cert.kind != CertificateKind::kConflictingVertex)
    throw std::invalid_argument("strengthen_elliptope: needs a conflicting-vertex certificate");
  std::vector<std::pair<int, double>> terms{
      {sym_entry_index(n, cert.i, cert.k), 1.0},
      {sym_entry_index(n, cert.i, cert.j), 1.0},
      {sym_entry_index(n, cert.j, cert.k), -1.0}};
  return make_cut(std::move(terms), 1.0, CutProvenance::kCgRounded);
}

/// Trace-simplex strengthening (tr X = K models), integer-scaled by 2:
///   <U + I + sum_{l not in {i,j,k}} E_ll, X>  >=  2 ceil(K/2),
/// returned as a <= cut by negation.
inline LinearCut strengthen_trace_simplex(const PsdCertificate& cert, int k_trace, int n) {
  if (cert.kind != CertificateKind::kConflictingVertex)
    throw std::invalid_argument(
        "strengthen_trace_simplex: needs a conflicting-vertex certificate");
  if (cert.i >= n || cert.j >= n || cert.k >= n)
    throw std::invalid_argument("strengthen_trace_simplex: certificate indices out of range");
  std::vector<double> v(n, 0.0);
  v[cert.j] = 1.0;
  v[cert.k] = 1.0;
  v[cert.i] = -1.0;
  SymMatrix m = SymMatrix::outer(v);
  for (int l = 0; l < n; ++l) {
    m.add(l, l, 1.0);
    if (l != cert.i && l != cert.j && l != cert.k) m.add(l, l, 1.0);
  }
  const double rhs = 2.0 * guarded_ceil(static_cast<double>(k_trace) / 2.0);
  // <M, X> over packed entries: diagonal coefficient M_ll, off-diagonal 2 M_ij
  std::vector<std::pair<int, double>> terms;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double c = (i == j) ? m(i, i) : 2.0 * m(i, j);
      if (c != 0.0) terms.emplace_back(sym_entry_index(n, i, j), -c);
    }
  return make_cut(std::move(terms), -rhs, CutProvenance::kCgRounded);
}

}  // namespace isdp
