#pragma once

// Independent reference computations for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "geodeq/fields.hpp"
#include "geodeq/linalg.hpp"

namespace oracle {

using geodeq::cplx;
using Dense = std::vector<std::vector<double>>;

inline Dense to_dense(const geodeq::RMatrix& m) {
  Dense d(m.dim(), std::vector<double>(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) d[i][j] = m(i, j);
  return d;
}

inline Dense minor_of(const Dense& a, std::size_t row, std::size_t col) {
  Dense m;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i == row) continue;
    std::vector<double> r;
    for (std::size_t j = 0; j < a.size(); ++j)
      if (j != col) r.push_back(a[i][j]);
    m.push_back(r);
  }
  return m;
}

// Laplace expansion along the first row.
inline double laplace_det(const Dense& a) {
  if (a.empty()) return 1.0;
  if (a.size() == 1) return a[0][0];
  double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    s += sign * a[0][j] * laplace_det(minor_of(a, 0, j));
  }
  return s;
}

// Transposed cofactor matrix.
inline Dense cofactor_adjugate(const Dense& a) {
  const std::size_t n = a.size();
  Dense adj(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj[j][i] = sign * laplace_det(minor_of(a, i, j));
    }
  return adj;
}

// Polynomials as coefficient vectors, lowest first.
using PolyVec = std::vector<double>;

inline PolyVec pmul(const PolyVec& a, const PolyVec& b) {
  PolyVec c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline PolyVec padd(const PolyVec& a, const PolyVec& b, double sb = 1.0) {
  PolyVec c(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] += sb * b[i];
  return c;
}

// det(t I - A) by Laplace expansion over polynomial entries.
inline PolyVec symbolic_char_poly(const Dense& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<PolyVec>> m(n, std::vector<PolyVec>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = i == j ? PolyVec{-a[i][j], 1.0} : PolyVec{-a[i][j]};
  std::function<PolyVec(const std::vector<std::vector<PolyVec>>&)> det = [&](const auto& x) -> PolyVec {
    if (x.size() == 1) return x[0][0];
    PolyVec s{0.0};
    for (std::size_t j = 0; j < x.size(); ++j) {
      std::vector<std::vector<PolyVec>> sub;
      for (std::size_t i = 1; i < x.size(); ++i) {
        std::vector<PolyVec> r;
        for (std::size_t k = 0; k < x.size(); ++k)
          if (k != j) r.push_back(x[i][k]);
        sub.push_back(r);
      }
      s = padd(s, pmul(x[0][j], det(sub)), (j % 2 == 0) ? 1.0 : -1.0);
    }
    return s;
  };
  return det(m);
}

// Monic polynomial with the given roots.
inline std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c{1.0};
  for (const auto& r : roots) {
    std::vector<cplx> d(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      d[k + 1] += c[k];
      d[k] -= r * c[k];
    }
    c = d;
  }
  return c;
}

// Plain Gaussian elimination, complex.
inline std::vector<std::vector<cplx>> complex_inverse(std::vector<std::vector<cplx>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<cplx>> inv(n, std::vector<cplx>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(inv[c], inv[p]);
    const cplx d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const cplx f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

// V diag(d) V^{-1}.
inline std::vector<std::vector<cplx>> from_eigen(const std::vector<std::vector<cplx>>& V, const std::vector<cplx>& d) {
  const std::size_t n = V.size();
  const auto Vi = complex_inverse(V);
  std::vector<std::vector<cplx>> r(n, std::vector<cplx>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) r[i][j] += V[i][k] * d[k] * Vi[k][j];
  return r;
}

// Central differences of a matrix field, step h.
inline std::vector<geodeq::RMatrix> finite_difference(const geodeq::TensorField& f, const geodeq::Point& p,
                                                      double h = 1e-5) {
  std::vector<geodeq::RMatrix> d;
  for (std::size_t k = 0; k < p.size(); ++k) {
    auto a = p, b = p;
    a[k] += h;
    b[k] -= h;
    d.push_back((f.value_at(a) - f.value_at(b)) * (1.0 / (2 * h)));
  }
  return d;
}

inline geodeq::Point random_point(std::mt19937_64& rng, std::size_t n, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  geodeq::Point p(n);
  for (auto& x : p) x = u(rng);
  return p;
}

}  // namespace oracle
