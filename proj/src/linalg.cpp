#include "geodeq/linalg.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace geodeq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Monic coefficients, lowest first.
std::vector<cplx> normalized(const std::vector<cplx>& c) {
  if (c.size() < 2) throw std::invalid_argument("poly_roots: degree must be at least 1");
  const cplx lead = c.back();
  if (lead == cplx(0)) throw std::invalid_argument("poly_roots: leading coefficient is zero");
  std::vector<cplx> a(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) a[k] = c[k] / lead;
  return a;
}

// p(z), p'(z), and the running-error bound of Horner's scheme for p(z).
struct Horner {
  cplx p, dp;
  double bound;
  double magnitude;  // sum |a_k| |z|^k
};

Horner horner(const std::vector<cplx>& a, cplx z) {
  cplx p = a.back();
  cplx dp = 0;
  const double az = std::abs(z);
  double mag = std::abs(a.back());
  for (std::size_t k = a.size() - 1; k-- > 0;) {
    dp = dp * z + p;
    p = p * z + a[k];
    mag = mag * az + std::abs(a[k]);
  }
  return {p, dp, 4.0 * double(a.size()) * kEps * mag, mag};
}

// Coefficients of p(w + s).
std::vector<cplx> taylor_shift(std::vector<cplx> a, cplx s) {
  const std::size_t n = a.size() - 1;
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i)
    for (std::ptrdiff_t k = std::ptrdiff_t(n) - 1; k >= i; --k) a[k] += s * a[k + 1];
  return a;
}

std::vector<cplx> aberth(const std::vector<cplx>& coeffs) {
  const auto a = normalized(coeffs);
  const std::size_t n = a.size() - 1;
  if (n == 1) return {-a[0]};

  const cplx center = -a[n - 1] / double(n);
  const auto shifted = taylor_shift(a, center);
  double radius = 0.0;
  for (std::size_t k = 1; k <= n; ++k) radius = std::max(radius, std::pow(std::abs(shifted[n - k]), 1.0 / double(k)));
  if (radius == 0.0) return std::vector<cplx>(n, center);

  std::vector<cplx> z(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = 2.0 * std::numbers::pi * double(j) / double(n) + 0.7;
    z[j] = center + radius * cplx(std::cos(angle), std::sin(angle));
  }

  std::vector<bool> done(n, false);
  for (int iter = 0; iter < kAberthMaxIterations; ++iter) {
    bool all = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (done[j]) continue;
      const auto h = horner(a, z[j]);
      if (std::abs(h.p) <= h.bound) {
        done[j] = true;
        continue;
      }
      all = false;
      cplx sum = 0;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j && z[k] != z[j]) sum += 1.0 / (z[j] - z[k]);
      if (h.dp == cplx(0)) {
        z[j] += radius * 1e-3 * cplx(1, 1);
        continue;
      }
      const cplx ratio = h.p / h.dp;
      const cplx w = ratio / (1.0 - ratio * sum);
      z[j] -= w;
      if (std::abs(w) <= kEps * std::abs(z[j])) done[j] = true;
    }
    if (all) return z;
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto h = horner(a, z[j]);
    if (std::abs(h.p) > 1e3 * h.bound)
      throw ConvergenceError("poly_roots: Aberth iteration did not converge (ill-conditioned input)");
  }
  return z;
}

void check_residuals(const std::vector<cplx>& coeffs, const std::vector<cplx>& roots, double tol) {
  const auto a = normalized(coeffs);
  for (const auto& r : roots) {
    const auto h = horner(a, r);
    if (std::abs(h.p) > std::max(tol, 1e3 * kEps) * h.magnitude)
      throw ConvergenceError("poly_roots: root residual above tolerance");
  }
}

void sort_roots(std::vector<cplx>& r) {
  std::sort(r.begin(), r.end(), [](cplx x, cplx y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace

std::vector<cplx> poly_roots(const Poly<cplx>& p, double tol) {
  auto r = aberth(p.coeffs);
  check_residuals(p.coeffs, r, tol);
  sort_roots(r);
  return r;
}

std::vector<cplx> poly_roots(const Poly<double>& p, double tol) {
  std::vector<cplx> c(p.coeffs.begin(), p.coeffs.end());
  auto r = aberth(c);
  check_residuals(c, r, tol);

  // Conjugate-symmetry projection: snap near-real roots, then pair each
  // upper root with the nearest unmatched lower root and average.
  std::vector<cplx> upper, lower, out;
  for (const auto& z : r) {
    if (std::abs(z.imag()) <= tol * (1.0 + std::abs(z)))
      out.emplace_back(z.real(), 0.0);
    else if (z.imag() > 0)
      upper.push_back(z);
    else
      lower.push_back(z);
  }
  std::vector<bool> used(lower.size(), false);
  for (const auto& u : upper) {
    std::size_t best = lower.size();
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (used[k]) continue;
      const double d = std::abs(std::conj(lower[k]) - u);
      if (d < dist) {
        dist = d;
        best = k;
      }
    }
    if (best == lower.size()) {
      out.emplace_back(u.real(), 0.0);
      continue;
    }
    used[best] = true;
    const cplx m = 0.5 * (u + std::conj(lower[best]));
    out.push_back(m);
    out.push_back(std::conj(m));
  }
  for (std::size_t k = 0; k < lower.size(); ++k)
    if (!used[k]) out.emplace_back(lower[k].real(), 0.0);
  sort_roots(out);
  return out;
}

std::vector<SpectralCluster> spectral_cluster(const std::vector<cplx>& roots, double tol) {
  const std::size_t n = roots.size();
  // Union-find over single-linkage edges.
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double scale = 1.0 + std::max(std::abs(roots[i]), std::abs(roots[j]));
      if (std::abs(roots[i] - roots[j]) <= tol * scale) parent[find(i)] = find(j);
    }

  std::vector<std::vector<cplx>> groups;
  std::vector<std::size_t> group_of(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = find(i);
    if (group_of[r] == n) {
      group_of[r] = groups.size();
      groups.emplace_back();
    }
    groups[group_of[r]].push_back(roots[i]);
  }

  std::vector<SpectralCluster> out;
  for (const auto& g : groups) {
    cplx c = 0;
    for (const auto& z : g) c += z;
    c /= double(g.size());
    SpectralCluster cl;
    cl.multiplicity = int(g.size());
    cl.members = g;
    if (std::abs(c.imag()) <= tol * (1.0 + std::abs(c))) {
      cl.value = cplx(c.real(), 0.0);
      cl.kind = ClusterKind::real;
      out.push_back(cl);
    } else if (c.imag() > 0) {
      cl.value = c;
      cl.kind = ClusterKind::conjugate_pair;
      out.push_back(cl);
    }
    // Lower-half clusters are represented by their upper partner.
  }
  std::sort(out.begin(), out.end(), [](const SpectralCluster& x, const SpectralCluster& y) {
    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
    return x.value.imag() < y.value.imag();
  });
  return out;
}

std::vector<SpectralNode> expand_nodes(const std::vector<SpectralCluster>& clusters) {
  std::vector<SpectralNode> nodes;
  for (const auto& c : clusters) {
    nodes.push_back({c.value, c.multiplicity});
    if (c.kind == ClusterKind::conjugate_pair) nodes.push_back({std::conj(c.value), c.multiplicity});
  }
  return nodes;
}

cplx NewtonPoly::operator()(cplx t) const {
  if (coeffs.empty()) return 0;
  cplx acc = coeffs.back();
  for (std::size_t k = coeffs.size() - 1; k-- > 0;) acc = acc * (t - nodes[k]) + coeffs[k];
  return acc;
}

Poly<cplx> NewtonPoly::monomial() const {
  Poly<cplx> acc{{coeffs.empty() ? cplx(0) : coeffs.back()}};
  for (std::size_t k = coeffs.size() - 1; k-- > 0;) {
    acc = acc * Poly<cplx>{{-nodes[k], cplx(1)}};
    acc.coeffs[0] += coeffs[k];
  }
  return acc;
}

NewtonPoly hermite_interpolant(const std::vector<SpectralNode>& nodes, const TargetFn& f) {
  std::vector<cplx> z;
  std::vector<std::size_t> node_id;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (int k = 0; k < nodes[i].multiplicity; ++k) {
      z.push_back(nodes[i].value);
      node_id.push_back(i);
    }
  const std::size_t m = z.size();
  // dd[i] holds f[z_i, ..., z_{i+order}] for the current order.
  std::vector<cplx> dd(m);
  for (std::size_t i = 0; i < m; ++i) dd[i] = f(z[i], 0);
  NewtonPoly p;
  p.nodes = z;
  p.coeffs.push_back(m ? dd[0] : cplx(0));
  double factorial = 1.0;
  for (std::size_t order = 1; order < m; ++order) {
    factorial *= double(order);
    for (std::size_t i = 0; i + order < m; ++i) {
      if (node_id[i] == node_id[i + order])
        dd[i] = f(z[i], int(order)) / factorial;
      else
        dd[i] = (dd[i + 1] - dd[i]) / (z[i + order] - z[i]);
    }
    p.coeffs.push_back(dd[0]);
  }
  return p;
}

std::vector<SpectralCluster> matrix_spectrum(const RMatrix& A, const MatrixFunctionOptions& opt) {
  const auto p = char_poly(A);
  auto clusters = spectral_cluster(poly_roots(p, opt.root_tol), opt.cluster_tol);
  // An m-fold root comes back from Aberth spread by about eps^(1/m) and
  // its centroid can be off by far more than eps. The (m-1)-th derivative
  // has a simple root there, so a few Newton steps on it restore accuracy.
  for (auto& c : clusters) {
    if (c.multiplicity < 2) continue;
    Poly<double> q = p;
    for (int k = 1; k < c.multiplicity; ++k) q = q.derivative();
    const Poly<double> dq = q.derivative();
    double radius = 0;
    for (const auto& r : c.members) radius = std::max(radius, std::abs(r - c.value));
    radius = 2 * radius + 1e-12 * (1 + std::abs(c.value));
    cplx z = c.value;
    for (int it = 0; it < 8; ++it) {
      const cplx d = dq(z);
      if (d == cplx(0)) break;
      const cplx step = q(z) / d;
      z -= step;
      if (c.kind == ClusterKind::real) z = z.real();
      if (std::abs(step) <= 4 * std::numeric_limits<double>::epsilon() * (1 + std::abs(z))) break;
    }
    if (std::isfinite(z.real()) && std::isfinite(z.imag()) && std::abs(z - c.value) <= radius) c.value = z;
  }
  return clusters;
}

NewtonPoly matrix_function_interpolant(const RMatrix& A, const TargetFn& f, bool doubled,
                                       const MatrixFunctionOptions& opt) {
  const auto clusters = matrix_spectrum(A, opt);
  // Targets must agree across the raw roots merged into each cluster.
  for (const auto& c : clusters) {
    const cplx fc = f(c.value, 0);
    for (const auto& r : c.members) {
      if (std::abs(f(r, 0) - fc) > 1e-8 * (1.0 + std::abs(fc)))
        throw SpectralError("matrix_function: clustered eigenvalues carry conflicting targets");
    }
  }
  auto nodes = expand_nodes(clusters);
  if (doubled)
    for (auto& n : nodes) n.multiplicity *= 2;
  return hermite_interpolant(nodes, f);
}

CMatrix matrix_function(const RMatrix& A, const TargetFn& f, const MatrixFunctionOptions& opt) {
  return eval_newton(matrix_function_interpolant(A, f, false, opt), A);
}

CJetMatrix matrix_function(const JetMatrix& A, const TargetFn& f, const MatrixFunctionOptions& opt) {
  return eval_newton(matrix_function_interpolant(values(A), f, true, opt), A);
}

namespace {

void check_off_axis(const RMatrix& A, double tol, const MatrixFunctionOptions& opt) {
  if (A.dim() % 2 != 0) throw SpectralError("complex_structure_J: dimension must be even");
  for (const auto& c : matrix_spectrum(A, opt)) {
    if (c.kind == ClusterKind::real) throw SpectralError("complex_structure_J: real eigenvalue present");
    for (const auto& r : c.members)
      if (std::abs(r.imag()) <= tol * (1.0 + std::abs(r)))
        throw SpectralError("complex_structure_J: eigenvalue too close to the real axis");
  }
}

cplx half_plane_sign(cplx z, int order) {
  if (order > 0) return 0;
  return z.imag() > 0 ? cplx(0, 1) : cplx(0, -1);
}

}  // namespace

RMatrix complex_structure_J(const RMatrix& A, double tol, const MatrixFunctionOptions& opt) {
  check_off_axis(A, tol, opt);
  const auto J = matrix_function(A, half_plane_sign, opt);
  const auto Jr = real_part(J);
  if (max_imag(J) > tol * (1.0 + max_abs(Jr))) throw SpectralError("complex_structure_J: result is not real");
  return Jr;
}

JetMatrix complex_structure_J(const JetMatrix& A, double tol, const MatrixFunctionOptions& opt) {
  check_off_axis(values(A), tol, opt);
  const auto J = matrix_function(A, half_plane_sign, opt);
  const auto Jv = values(J);
  if (max_imag(Jv) > tol * (1.0 + max_abs(real_part(Jv))))
    throw SpectralError("complex_structure_J: result is not real");
  return J.map([](const CJet& z) { return real(z); });
}

RMatrix real_part(const CMatrix& m) {
  return m.map([](const cplx& z) { return z.real(); });
}

double max_imag(const CMatrix& m) {
  double r = 0;
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) r = std::max(r, std::abs(m(i, j).imag()));
  return r;
}

}  // namespace geodeq
