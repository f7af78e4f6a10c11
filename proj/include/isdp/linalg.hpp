#pragma once

// Dense symmetric linear algebra: trace inner products, extreme eigenvalues,
// orthonormal complement bases and directed-graph algebraic connectivity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace isdp {

/// Minimal dense row-major matrix.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
};

/// Dense symmetric matrix of order n. Symmetry is enforced at construction.
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0.0) {
    if (n < 1) throw std::invalid_argument("SymMatrix: order must be >= 1");
  }

  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows,
                             double sym_tol = 1e-12) {
    const int n = static_cast<int>(rows.size());
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw std::invalid_argument("SymMatrix: ragged rows");
      for (int j = 0; j < n; ++j) m.a_[static_cast<size_t>(i) * n + j] = rows[i][j];
    }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(m(i, j) - m(j, i)) > sym_tol)
          throw std::invalid_argument("SymMatrix: input not symmetric");
    return m;
  }

  static SymMatrix identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
  }

  static SymMatrix ones(int n) {
    SymMatrix m(n);
    std::fill(m.a_.begin(), m.a_.end(), 1.0);
    return m;
  }

  /// e_i e_j^T + e_j e_i^T for i != j, e_i e_i^T for i == j.
  static SymMatrix sym_unit(int n, int i, int j) {
    SymMatrix m(n);
    m.set(i, j, 1.0);
    return m;
  }

  /// Rank-1 matrix v v^T.
  static SymMatrix outer(const std::vector<double>& v) {
    SymMatrix m(static_cast<int>(v.size()));
    for (int i = 0; i < m.n_; ++i)
      for (int j = 0; j < m.n_; ++j) m.a_[static_cast<size_t>(i) * m.n_ + j] = v[i] * v[j];
    return m;
  }

  int order() const { return n_; }

  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  /// Symmetric write: assigns both (i,j) and (j,i).
  void set(int i, int j, double v) {
    a_[static_cast<size_t>(i) * n_ + j] = v;
    a_[static_cast<size_t>(j) * n_ + i] = v;
  }

  void add(int i, int j, double v) {
    a_[static_cast<size_t>(i) * n_ + j] += v;
    if (i != j) a_[static_cast<size_t>(j) * n_ + i] += v;
  }

  SymMatrix& axpy(double alpha, const SymMatrix& other) {
    if (other.n_ != n_) throw std::invalid_argument("SymMatrix::axpy: dimension mismatch");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += alpha * other.a_[k];
    return *this;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  std::vector<double> multiply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      const double* row = &a_[static_cast<size_t>(i) * n_];
      for (int j = 0; j < n_; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    return y;
  }

  const std::vector<double>& raw() const { return a_; }

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// <A, B> = sum_ij a_ij b_ij.
inline double trace_inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) throw std::invalid_argument("trace_inner: dimension mismatch");
  double s = 0.0;
  const auto& x = a.raw();
  const auto& y = b.raw();
  for (size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

/// Smallest eigenvalue and a unit eigenvector.
struct EigenResult {
  double value = 0.0;
  std::vector<double> vector;
};

namespace detail {

inline double hypot2(double a, double b) { return std::hypot(a, b); }

// Householder reduction of a symmetric matrix to tridiagonal form, accumulating
// the orthogonal transform in q. On exit q^T A q = tridiag(d, e), e[0] unused.
inline void tridiagonalize(const SymMatrix& a, Matrix& q, std::vector<double>& d,
                           std::vector<double>& e) {
  const int n = a.order();
  q = Matrix(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q(i, j) = a(i, j);
  d.assign(n, 0.0);
  e.assign(n, 0.0);

  for (int i = n - 1; i > 0; --i) {
    const int l = i - 1;
    double h = 0.0;
    double scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(q(i, k));
      if (scale == 0.0) {
        e[i] = q(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          q(i, k) /= scale;
          h += q(i, k) * q(i, k);
        }
        double f = q(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        q(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          q(j, i) = q(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += q(j, k) * q(i, k);
          for (int k = j + 1; k <= l; ++k) g += q(k, j) * q(i, k);
          e[j] = g / h;
          f += e[j] * q(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = q(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) q(j, k) -= f * e[k] + g * q(i, k);
        }
      }
    } else {
      e[i] = q(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += q(i, k) * q(k, j);
        for (int k = 0; k <= l; ++k) q(k, j) -= g * q(k, i);
      }
    }
    d[i] = q(i, i);
    q(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) q(j, i) = q(i, j) = 0.0;
  }
}

// Implicit-shift QL on a tridiagonal matrix, rotating the columns of q along.
// Iteration cap: 50 sweeps per eigenvalue (<= 50 n in total).
inline void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e, Matrix& q) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 50)
          throw std::runtime_error("min_eig: QL iteration cap reached, residual " +
                                   std::to_string(std::abs(e[l])));
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = hypot2(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        bool underflow_restart = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = hypot2(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow_restart = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (int k = 0; k < n; ++k) {
            f = q(k, i + 1);
            q(k, i + 1) = s * q(k, i) + c * f;
            q(k, i) = c * q(k, i) - s * f;
          }
        }
        if (underflow_restart) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/// All eigenvalues (ascending) and the orthogonal eigenvector matrix (columns).
inline void sym_eigen(const SymMatrix& a, std::vector<double>& values, Matrix& vectors) {
  const int n = a.order();
  std::vector<double> e;
  detail::tridiagonalize(a, vectors, values, e);
  detail::ql_implicit_shift(values, e, vectors);
  // sort ascending, permuting columns
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](int i, int j) { return values[i] < values[j]; });
  std::vector<double> vs(n);
  Matrix vv(n, n);
  for (int j = 0; j < n; ++j) {
    vs[j] = values[perm[j]];
    for (int i = 0; i < n; ++i) vv(i, j) = vectors(i, perm[j]);
  }
  values = std::move(vs);
  vectors = std::move(vv);
}

/// Smallest eigenvalue of a with a unit-norm eigenvector.
/// Householder tridiagonalization + implicit-shift QL (deterministic, n <= 512 regime).
inline EigenResult min_eig(const SymMatrix& a, double tol = 1e-9) {
  if (tol <= 0.0) throw std::invalid_argument("min_eig: tol must be positive");
  const int n = a.order();
  std::vector<double> values;
  Matrix vecs;
  sym_eigen(a, values, vecs);

  EigenResult res;
  res.value = values[0];
  res.vector.resize(n);
  for (int i = 0; i < n; ++i) res.vector[i] = vecs(i, 0);

  double norm = 0.0;
  for (double v : res.vector) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : res.vector) v /= norm;

  // residual guard from the contract
  const auto av = a.multiply(res.vector);
  double resid = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = av[i] - res.value * res.vector[i];
    resid += r * r;
  }
  resid = std::sqrt(resid);
  const double bound = 1e-8 * std::max(1.0, a.frobenius_norm());
  if (resid > bound)
    throw std::runtime_error("min_eig: residual " + std::to_string(resid) +
                             " exceeds bound " + std::to_string(bound));
  return res;
}

/// n x (n-1) matrix whose columns form an orthonormal basis of the complement of
/// the all-ones vector (Helmert construction, closed form).
inline Matrix complement_basis(int n) {
  if (n < 2) throw std::invalid_argument("complement_basis: n must be >= 2");
  Matrix w(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double denom = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) w(i, k - 1) = denom;
    w(k, k - 1) = -static_cast<double>(k) * denom;
  }
  return w;
}

/// Algebraic connectivity of a directed graph: lambda_min of
/// 1/2 W^T (L + L^T) W with L the out-degree Laplacian.
inline double algebraic_connectivity(const Matrix& adjacency) {
  const int n = adjacency.rows;
  if (adjacency.cols != n) throw std::invalid_argument("algebraic_connectivity: not square");
  for (int i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0)
      throw std::invalid_argument("algebraic_connectivity: nonzero diagonal");
    for (int j = 0; j < n; ++j) {
      const double v = adjacency(i, j);
      if (v != 0.0 && v != 1.0)
        throw std::invalid_argument("algebraic_connectivity: entries must be 0/1");
    }
  }
  // L = D - A, symmetrized: S = 1/2 (L + L^T)
  SymMatrix s(n);
  for (int i = 0; i < n; ++i) {
    double outdeg = 0.0;
    for (int j = 0; j < n; ++j) outdeg += adjacency(i, j);
    s.add(i, i, outdeg);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = -(adjacency(i, j) + adjacency(j, i)) / 2.0;
      if (v != 0.0) s.set(i, j, v);
    }

  const Matrix w = complement_basis(n);
  SymMatrix proj(n - 1);
  // proj = W^T S W
  for (int p = 0; p < n - 1; ++p) {
    std::vector<double> wp(n);
    for (int i = 0; i < n; ++i) wp[i] = w(i, p);
    const auto swp = s.multiply(wp);
    for (int qcol = p; qcol < n - 1; ++qcol) {
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += w(i, qcol) * swp[i];
      proj.set(p, qcol, v);
    }
  }
  return min_eig(proj).value;
}

}  // namespace isdp
