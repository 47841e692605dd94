#pragma once

// Small dense matrices (dim <= 8) over double, complex, or jet scalars,
// together with the polynomial machinery the rest of the library needs:
// Faddeev-LeVerrier characteristic polynomials and adjugates, Aberth root
// finding, spectral clustering, and matrix functions by Hermite interpolation.

#include <algorithm>
#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "geodeq/errors.hpp"
#include "geodeq/jet.hpp"

namespace geodeq {

using cplx = std::complex<double>;

template <class S>
class Matrix {
 public:
  using scalar_type = S;

  Matrix() = default;
  explicit Matrix(std::size_t n) : n_(n) {
    if (n > kMaxDim) throw std::invalid_argument("matrix dimension exceeds 8");
  }
  Matrix(std::initializer_list<std::initializer_list<S>> rows) : Matrix(rows.size()) {
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n_) throw std::invalid_argument("matrix rows must be square");
      std::size_t j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
    return m;
  }

  std::size_t dim() const { return n_; }
  S& operator()(std::size_t i, std::size_t j) { return a_[i * kMaxDim + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return a_[i * kMaxDim + j]; }

  Matrix& operator+=(const Matrix& b) {
    check(b);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) += b(i, j);
    return *this;
  }
  Matrix& operator-=(const Matrix& b) {
    check(b);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) -= b(i, j);
    return *this;
  }
  Matrix& operator*=(const S& s) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) (*this)(i, j) *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const S& s) { return a *= s; }
  friend Matrix operator*(const S& s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    a.check(b);
    Matrix c(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t k = 0; k < a.n_; ++k) {
        const S& aik = a(i, k);
        for (std::size_t j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  Matrix transpose() const {
    Matrix t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  S trace() const {
    S t{};
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  // Adds s to the diagonal.
  Matrix shifted(const S& s) const {
    Matrix m(*this);
    for (std::size_t i = 0; i < n_; ++i) m(i, i) += s;
    return m;
  }

  template <class F>
  auto map(F&& f) const {
    using R = decltype(f(std::declval<const S&>()));
    Matrix<R> r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(i, j) = f((*this)(i, j));
    return r;
  }

 private:
  void check(const Matrix& b) const {
    if (b.n_ != n_) throw std::logic_error("matrix dimension mismatch");
  }

  std::size_t n_ = 0;
  std::array<S, kMaxDim * kMaxDim> a_{};
};

using RMatrix = Matrix<double>;
using CMatrix = Matrix<cplx>;
using JetMatrix = Matrix<RJet>;
using CJetMatrix = Matrix<CJet>;

template <class S>
auto values(const Matrix<S>& m) {
  return m.map([](const S& s) { return value_of(s); });
}

// Largest absolute entry.
template <class S>
double max_abs(const Matrix<S>& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) r = std::max(r, std::abs(value_of(m(i, j))));
  return r;
}

// Block-diagonal embedding of square blocks.
template <class S>
Matrix<S> direct_sum(const std::vector<Matrix<S>>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.dim();
  Matrix<S> m(n);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.dim(); ++i)
      for (std::size_t j = 0; j < b.dim(); ++j) m(off + i, off + j) = b(i, j);
    off += b.dim();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Polynomials, coefficients stored lowest degree first.

template <class S>
struct Poly {
  std::vector<S> coeffs;

  std::size_t degree() const { return coeffs.empty() ? 0 : coeffs.size() - 1; }

  template <class X>
  X operator()(const X& x) const {
    X acc{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + X(*it);
    return acc;
  }

  Poly derivative() const {
    Poly d;
    for (std::size_t k = 1; k < coeffs.size(); ++k) d.coeffs.push_back(coeffs[k] * S(double(k)));
    if (d.coeffs.empty()) d.coeffs.push_back(S{});
    return d;
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly c;
    if (a.coeffs.empty() || b.coeffs.empty()) return c;
    c.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, S{});
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs.size(); ++j) c.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    return c;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly c;
    c.coeffs.assign(std::max(a.coeffs.size(), b.coeffs.size()), S{});
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) c.coeffs[i] += a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) c.coeffs[i] += b.coeffs[i];
    return c;
  }
};

// p(A) by Horner's scheme; works for any scalar mix where S * M is defined.
template <class PS, class S>
Matrix<S> eval_matrix(const Poly<PS>& p, const Matrix<S>& A) {
  const std::size_t n = A.dim();
  Matrix<S> acc(n);
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = (acc * A).shifted(S(*it));
  return acc;
}

// ---------------------------------------------------------------------------
// Faddeev-LeVerrier. Only integer divisions occur, so the recursion is exact
// on integer matrices and stays polynomial in the entries for jet scalars.

template <class S>
struct LeverrierResult {
  Poly<S> char_poly;  // monic det(t I - A)
  Matrix<S> adjugate;
  S det;
};

template <class S>
LeverrierResult<S> faddeev_leverrier(const Matrix<S>& A) {
  const std::size_t n = A.dim();
  if (n == 0) throw std::invalid_argument("faddeev_leverrier: empty matrix");
  std::vector<S> c(n + 1, S{});
  c[n] = S(1);
  Matrix<S> M(n);  // M_0 = 0
  Matrix<S> AM(n);
  for (std::size_t k = 1; k <= n; ++k) {
    M = AM.shifted(c[n - k + 1]);
    AM = A * M;
    c[n - k] = -AM.trace() / S(double(k));
  }
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  LeverrierResult<S> r;
  r.char_poly.coeffs = c;
  r.det = c[0] * S(sign);
  r.adjugate = M * S(-sign);  // (-1)^(n-1) M_n
  return r;
}

template <class S>
Poly<S> char_poly(const Matrix<S>& A) {
  return faddeev_leverrier(A).char_poly;
}

template <class S>
Matrix<S> adjugate(const Matrix<S>& A) {
  return faddeev_leverrier(A).adjugate;
}

template <class S>
S det(const Matrix<S>& A) {
  return faddeev_leverrier(A).det;
}

// Gauss-Jordan inverse with partial pivoting on the value magnitudes.
template <class S>
Matrix<S> inverse(const Matrix<S>& A) {
  const std::size_t n = A.dim();
  Matrix<S> a(A);
  Matrix<S> inv = Matrix<S>::identity(n);
  double scale = max_abs(A);
  if (scale == 0.0) throw SingularError("inverse: zero matrix");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(value_of(a(col, col)));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(value_of(a(r, col)));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best <= 1e-14 * scale) throw SingularError("inverse: matrix is singular to working precision");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    const S p = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= p;
      inv(col, j) /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const S f = a(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Roots and spectra.

inline constexpr double kDefaultClusterTol = 1e-7;
inline constexpr int kAberthMaxIterations = 200;

// All complex roots with multiplicity. For real coefficients the result is
// conjugate-symmetric and imaginary parts below tol*(1+|z|) are zeroed.
std::vector<cplx> poly_roots(const Poly<double>& p, double tol = kDefaultClusterTol);
std::vector<cplx> poly_roots(const Poly<cplx>& p, double tol = kDefaultClusterTol);

enum class ClusterKind { real, conjugate_pair };

struct SpectralCluster {
  cplx value;  // centroid; Im > 0 for conjugate pairs
  int multiplicity = 0;  // per member of a conjugate pair
  ClusterKind kind = ClusterKind::real;
  std::vector<cplx> members;  // raw roots merged into this cluster (upper half for pairs)
};

// Single-linkage merge of roots closer than tol*(1+|z|); conjugate pairs
// are reported once with the upper-half-plane representative.
std::vector<SpectralCluster> spectral_cluster(const std::vector<cplx>& roots, double tol = kDefaultClusterTol);

// Every distinct eigenvalue location of a real matrix spectrum, conjugate
// pairs expanded into two nodes.
struct SpectralNode {
  cplx value;
  int multiplicity;
};
std::vector<SpectralNode> expand_nodes(const std::vector<SpectralCluster>& clusters);

// Target for a matrix function: order-th derivative of f at z.
using TargetFn = std::function<cplx(cplx z, int order)>;

// Newton form of a Hermite interpolant: P(t) = sum_k c_k prod_{j<k} (t - z_j).
struct NewtonPoly {
  std::vector<cplx> nodes;
  std::vector<cplx> coeffs;

  cplx operator()(cplx t) const;
  Poly<cplx> monomial() const;
};

// Confluent divided differences matching f^{(k)}(z) for k < multiplicity.
NewtonPoly hermite_interpolant(const std::vector<SpectralNode>& nodes, const TargetFn& f);

template <class S>
auto eval_newton(const NewtonPoly& p, const Matrix<S>& A) {
  using C = std::conditional_t<is_jet_v<S>, CJet, cplx>;
  const std::size_t n = A.dim();
  const auto Ac = A.map([](const S& s) {
    if constexpr (is_jet_v<S>)
      return to_complex(s);
    else
      return cplx(s);
  });
  Matrix<C> acc(n);
  if (p.coeffs.empty()) return acc;
  acc = acc.shifted(C(p.coeffs.back()));
  for (std::size_t k = p.coeffs.size() - 1; k-- > 0;) acc = (Ac.shifted(C(-p.nodes[k])) * acc).shifted(C(p.coeffs[k]));
  return acc;
}

struct MatrixFunctionOptions {
  double cluster_tol = 1e-3;
  double root_tol = kDefaultClusterTol;
};

// Eigenvalue clusters of a real matrix (char poly + Aberth + clustering).
std::vector<SpectralCluster> matrix_spectrum(const RMatrix& A, const MatrixFunctionOptions& opt = {});

// Builds the interpolant for f on the spectrum of A. With `doubled` set
// every multiplicity is doubled, which makes P(A) exact to first
// order under perturbation of A (used for jet evaluation).
NewtonPoly matrix_function_interpolant(const RMatrix& A, const TargetFn& f, bool doubled,
                                       const MatrixFunctionOptions& opt = {});

// f(A) realized as P(A) with P the Hermite interpolant of f on the spectrum.
CMatrix matrix_function(const RMatrix& A, const TargetFn& f, const MatrixFunctionOptions& opt = {});

// Jet version: value and first derivatives of f(A(x)).
CJetMatrix matrix_function(const JetMatrix& A, const TargetFn& f, const MatrixFunctionOptions& opt = {});

// Canonical complex structure: f = +i on the upper half plane, -i on the
// lower. Requires every eigenvalue at distance > tol*(1+|z|) from the real
// axis; the imaginary residue of the result must stay below tol.
RMatrix complex_structure_J(const RMatrix& A, double tol = 1e-6, const MatrixFunctionOptions& opt = {});
JetMatrix complex_structure_J(const JetMatrix& A, double tol = 1e-6, const MatrixFunctionOptions& opt = {});

RMatrix real_part(const CMatrix& m);
double max_imag(const CMatrix& m);

}  // namespace geodeq
