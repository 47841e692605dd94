#include "geodeq/normalforms.hpp"

#include <cmath>
#include <sstream>

#include "geodeq/errors.hpp"

namespace geodeq {

namespace {

template <class S>
Matrix<S> jordan_operator(std::size_t n, const S& lambda, const std::vector<S>& a) {
  Matrix<S> L(n);
  for (std::size_t i = 0; i < n; ++i) L(i, i) = lambda;
  for (std::size_t i = 0; i + 2 < n; ++i) L(i, i + 1) = S(1.0);
  // The last column wins over the superdiagonal, which matters for n = 2.
  for (std::size_t i = 0; i + 1 < n; ++i) L(i, n - 1) = a[i + 1];
  return L;
}

// Anti-diagonal form with a_{n-1}, ..., a_1 down the last column.
template <class S>
Matrix<S> jordan_form(std::size_t n, const std::vector<S>& a, const S& corner) {
  Matrix<S> g(n);
  if (n == 1) {
    g(0, 0) = S(1.0);
    return g;
  }
  for (std::size_t k = 1; k + 1 < n; ++k) g(k, n - 1 - k) = S(1.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    g(k, n - 1) = a[n - 1 - k];
    g(n - 1, k) = a[n - 1 - k];
  }
  g(n - 1, n - 1) = corner;
  return g;
}

template <class S>
S corner_sum(std::size_t n, const std::vector<S>& a) {
  S s{};
  for (std::size_t i = 1; i + 2 <= n; ++i) s += a[i] * a[n - i - 1];
  return s;
}

// Corner for the normalized forms in terms of the raw coordinates.
template <class S>
S normalized_corner(std::size_t n, std::span<const S> x, CornerVariant v) {
  S s{};
  for (std::size_t i = 1; i + 2 <= n; ++i) {
    const double c = v == CornerVariant::theorem ? double(i * (n - i - 1)) : double(i * (n - i + 1));
    s += S(c) * x[i - 1] * x[n - i - 2];
  }
  return s;
}

JetMatrix realify_operator(const CJetMatrix& m) {
  JetMatrix r(2 * m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) {
      const RJet a = real(m(i, j)), b = imag(m(i, j));
      r(2 * i, 2 * j) = a;
      r(2 * i, 2 * j + 1) = -b;
      r(2 * i + 1, 2 * j) = b;
      r(2 * i + 1, 2 * j + 1) = a;
    }
  return r;
}

JetMatrix realify_form(const CJetMatrix& m) {
  JetMatrix r(2 * m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) {
      const RJet a = real(m(i, j)), b = imag(m(i, j));
      r(2 * i, 2 * j) = a;
      r(2 * i, 2 * j + 1) = -b;
      r(2 * i + 1, 2 * j) = -b;
      r(2 * i + 1, 2 * j + 1) = -a;
    }
  return r;
}

std::vector<CJet> complex_coords(JetCoords x) {
  std::vector<CJet> z;
  for (std::size_t k = 0; k + 1 < x.size(); k += 2) z.push_back(make_complex(x[k], x[k + 1]));
  return z;
}

// g^C = -i A (L^C - conj(lambda))^n, both realified.
std::pair<JetMatrix, JetMatrix> complex_block(std::size_t n, const CJet& lambda, const std::vector<CJet>& a,
                                              const CJet& corner) {
  const auto Lc = jordan_operator(n, lambda, a);
  const auto A = jordan_form(n, a, corner);
  const auto M = Lc.shifted(-conj(lambda));
  auto P = CJetMatrix::identity(n);
  for (std::size_t k = 0; k < n; ++k) P = P * M;
  const auto gc = (A * P) * CJet(cplx(0, -1));
  return {realify_form(gc), realify_operator(Lc)};
}

void require_dim(const Chart& chart, std::size_t n, const char* kind) {
  if (chart.dim() != n) {
    std::ostringstream msg;
    msg << kind << ": chart has dimension " << chart.dim() << ", expected " << n;
    throw SpecError(msg.str());
  }
}

void require_epsilon(int epsilon) {
  if (epsilon != 1 && epsilon != -1) throw SpecError("epsilon must be +1 or -1");
}

void require_real(const ParamFn& f, const char* name) {
  if (f.is_complex()) throw SpecError(std::string(name) + " must have real coefficients");
}

double lo_of(const Chart& c, std::size_t k) { return c.box()[k].first; }
double hi_of(const Chart& c, std::size_t k) { return c.box()[k].second; }

}  // namespace

std::pair<double, double> param_range(const ParamFn& f, double lo, double hi) {
  constexpr int kSamples = 1024;
  double mn = f(lo), mx = mn;
  for (int k = 1; k <= kSamples; ++k) {
    const double v = f(lo + (hi - lo) * double(k) / kSamples);
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  return {mn, mx};
}

MetricPair dini_pair(const ParamFn& X, const ParamFn& Y, const Chart& chart, int epsilon) {
  require_dim(chart, 2, "dini");
  require_epsilon(epsilon);
  require_real(X, "X");
  require_real(Y, "Y");
  const auto [xmin, xmax] = param_range(X, lo_of(chart, 0), hi_of(chart, 0));
  const auto [ymin, ymax] = param_range(Y, lo_of(chart, 1), hi_of(chart, 1));
  if (!(xmin > 0 && xmax < ymin)) throw DomainError("dini: requires 0 < X(x) < Y(y) on the whole chart box");
  const double eps = epsilon;
  MetricPair p;
  p.kind = "dini";
  p.chart = chart;
  p.chart.add_exclusion({"Y-X", [X, Y](std::span<const double> q) { return Y(q[1]) - X(q[0]); }});
  p.g = MetricField(2, [X, Y, eps](JetCoords x) {
    const RJet f = (Y(x[1]) - X(x[0])) * RJet(eps);
    return JetMatrix{{f, RJet()}, {RJet(), f}};
  });
  p.gbar = MetricField(2, [X, Y, eps](JetCoords x) {
    const RJet xv = X(x[0]), yv = Y(x[1]);
    const RJet f = (RJet(1.0) / xv - RJet(1.0) / yv) * RJet(eps);
    return JetMatrix{{f / xv, RJet()}, {RJet(), f / yv}};
  });
  p.L = EndoField(2, [X, Y](JetCoords x) { return JetMatrix{{X(x[0]), RJet()}, {RJet(), Y(x[1])}}; });
  return p;
}

MetricPair levicivita3_pair(const ParamFn& X, const ParamFn& Y, const ParamFn& Z, const Chart& chart, int epsilon) {
  require_dim(chart, 3, "levicivita3");
  require_epsilon(epsilon);
  require_real(X, "X");
  require_real(Y, "Y");
  require_real(Z, "Z");
  const auto rx = param_range(X, lo_of(chart, 0), hi_of(chart, 0));
  const auto ry = param_range(Y, lo_of(chart, 1), hi_of(chart, 1));
  const auto rz = param_range(Z, lo_of(chart, 2), hi_of(chart, 2));
  if (!(rx.first > 0 && rx.second < ry.first && ry.second < rz.first))
    throw DomainError("levicivita3: requires 0 < X < Y < Z on the whole chart box");
  const double eps = epsilon;
  MetricPair p;
  p.kind = "levicivita3";
  p.chart = chart;
  p.g = MetricField(3, [X, Y, Z, eps](JetCoords x) {
    const RJet a = X(x[0]), b = Y(x[1]), c = Z(x[2]);
    JetMatrix g(3);
    g(0, 0) = (b - a) * (c - a) * RJet(eps);
    g(1, 1) = (b - a) * (c - b) * RJet(eps);
    g(2, 2) = (c - b) * (c - a) * RJet(eps);
    return g;
  });
  p.L = EndoField(3, [X, Y, Z](JetCoords x) {
    JetMatrix L(3);
    L(0, 0) = X(x[0]);
    L(1, 1) = Y(x[1]);
    L(2, 2) = Z(x[2]);
    return L;
  });
  return p;
}

MetricPair interval_pair(const ParamFn& X, const Chart& chart, int epsilon) {
  require_dim(chart, 1, "interval");
  require_epsilon(epsilon);
  require_real(X, "X");
  const double eps = epsilon;
  MetricPair p;
  p.kind = "interval";
  p.chart = chart;
  p.chart.add_exclusion({"X", [X](std::span<const double> q) { return X(q[0]); }});
  p.g = MetricField(1, [eps](JetCoords) { return JetMatrix{{RJet(eps)}}; });
  p.L = EndoField(1, [X](JetCoords x) { return JetMatrix{{X(x[0])}}; });
  return p;
}

MetricPair real_jordan_pair(std::size_t n, const ParamFn& lambda, const Chart& chart, int epsilon) {
  if (n < 2 || n > kMaxDim) throw SpecError("real_jordan: n must be between 2 and 8");
  require_dim(chart, n, "real_jordan");
  require_epsilon(epsilon);
  require_real(lambda, "lambda");
  const ParamFn dlambda = lambda.derivative();
  const double eps = epsilon;
  auto coeffs = [n, dlambda](JetCoords x) {
    const RJet lp = dlambda(x[n - 1]);
    std::vector<RJet> a(n);
    for (std::size_t i = 1; i + 2 <= n; ++i) a[i] = RJet(double(i)) * lp * x[i - 1];
    a[n - 1] = RJet(1.0) + RJet(double(n - 1)) * lp * x[n - 2];
    return a;
  };
  MetricPair p;
  p.kind = "real_jordan";
  p.chart = chart;
  p.chart.add_exclusion({"lambda", [n, lambda](std::span<const double> q) { return lambda(q[n - 1]); }});
  p.chart.add_exclusion({"a_{n-1}", [n, dlambda](std::span<const double> q) {
                           return 1.0 + double(n - 1) * dlambda(q[n - 1]) * q[n - 2];
                         }});
  p.g = MetricField(n, [n, coeffs, eps](JetCoords x) {
    const auto a = coeffs(x);
    return jordan_form(n, a, corner_sum(n, a)) * RJet(eps);
  });
  p.L = EndoField(n, [n, coeffs, lambda](JetCoords x) { return jordan_operator(n, lambda(x[n - 1]), coeffs(x)); });
  return p;
}

MetricPair real_jordan_normalized_pair(std::size_t n, const ParamFn& h, const Chart& chart, int epsilon,
                                       CornerVariant corner) {
  if (n < 2 || n > kMaxDim) throw SpecError("real_jordan_normalized: n must be between 2 and 8");
  require_dim(chart, n, "real_jordan_normalized");
  require_epsilon(epsilon);
  require_real(h, "h");
  const double eps = epsilon;
  auto coeffs = [n, h](JetCoords x) {
    std::vector<RJet> a(n);
    for (std::size_t i = 1; i + 2 <= n; ++i) a[i] = RJet(double(i)) * x[i - 1];
    a[n - 1] = h(x[n - 1]) + RJet(double(n - 1)) * x[n - 2];
    return a;
  };
  MetricPair p;
  p.kind = "real_jordan_normalized";
  p.chart = chart;
  p.chart.add_exclusion({"x_n", [n](std::span<const double> q) { return q[n - 1]; }});
  p.chart.add_exclusion(
      {"a_{n-1}", [n, h](std::span<const double> q) { return h(q[n - 1]) + double(n - 1) * q[n - 2]; }});
  p.g = MetricField(n, [n, coeffs, eps, corner](JetCoords x) {
    return jordan_form(n, coeffs(x), normalized_corner<RJet>(n, x, corner)) * RJet(eps);
  });
  p.L = EndoField(n, [n, coeffs](JetCoords x) { return jordan_operator(n, x[n - 1], coeffs(x)); });
  return p;
}

MetricPair complex_jordan_pair(std::size_t n, const ParamFn& lambda, const Chart& chart, int epsilon) {
  if (n < 1 || 2 * n > kMaxDim) throw SpecError("complex_jordan: n must be between 1 and 4");
  require_dim(chart, 2 * n, "complex_jordan");
  require_epsilon(epsilon);
  const ParamFn dlambda = lambda.derivative();
  const double eps = epsilon;
  auto build = [n, lambda, dlambda](JetCoords x) {
    const auto z = complex_coords(x);
    const CJet lam = lambda(z[n - 1]);
    const CJet lp = dlambda(z[n - 1]);
    std::vector<CJet> a(n);
    for (std::size_t i = 1; i + 2 <= n; ++i) a[i] = CJet(double(i)) * lp * z[i - 1];
    if (n >= 2) a[n - 1] = CJet(1.0) + CJet(double(n - 1)) * lp * z[n - 2];
    return complex_block(n, lam, a, corner_sum(n, a));
  };
  MetricPair p;
  p.kind = "complex_jordan";
  p.chart = chart;
  p.chart.add_exclusion({"Im lambda", [n, lambda](std::span<const double> q) {
                           return lambda(cplx(q[2 * n - 2], q[2 * n - 1])).imag();
                         }});
  if (n >= 2)
    p.chart.add_exclusion({"a_{n-1}", [n, dlambda](std::span<const double> q) {
                             const cplx zn(q[2 * n - 2], q[2 * n - 1]), zm(q[2 * n - 4], q[2 * n - 3]);
                             return std::abs(1.0 + double(n - 1) * dlambda(zn) * zm);
                           }});
  p.g = MetricField(2 * n, [build, eps](JetCoords x) { return build(x).first * RJet(eps); });
  p.L = EndoField(2 * n, [build](JetCoords x) { return build(x).second; });
  return p;
}

MetricPair complex_jordan_normalized_pair(std::size_t n, const ParamFn& h, const Chart& chart, int epsilon,
                                          CornerVariant corner) {
  if (n < 1 || 2 * n > kMaxDim) throw SpecError("complex_jordan_normalized: n must be between 1 and 4");
  require_dim(chart, 2 * n, "complex_jordan_normalized");
  require_epsilon(epsilon);
  const double eps = epsilon;
  auto build = [n, h, corner](JetCoords x) {
    const auto z = complex_coords(x);
    std::vector<CJet> a(n);
    for (std::size_t i = 1; i + 2 <= n; ++i) a[i] = CJet(double(i)) * z[i - 1];
    if (n >= 2) a[n - 1] = h(z[n - 1]) + CJet(double(n - 1)) * z[n - 2];
    return complex_block(n, z[n - 1], a, normalized_corner<CJet>(n, z, corner));
  };
  MetricPair p;
  p.kind = "complex_jordan_normalized";
  p.chart = chart;
  p.chart.add_exclusion({"Im z_n", [n](std::span<const double> q) { return q[2 * n - 1]; }});
  if (n >= 2)
    p.chart.add_exclusion({"a_{n-1}", [n, h](std::span<const double> q) {
                             const cplx zn(q[2 * n - 2], q[2 * n - 1]), zm(q[2 * n - 4], q[2 * n - 3]);
                             return std::abs(h(zn) + double(n - 1) * zm);
                           }});
  p.g = MetricField(2 * n, [build, eps](JetCoords x) { return build(x).first * RJet(eps); });
  p.L = EndoField(2 * n, [build](JetCoords x) { return build(x).second; });
  return p;
}

MetricPair affine_complex3_pair(double alpha, double beta, const ParamFn& lambda, const Chart& chart, int epsilon) {
  require_dim(chart, 3, "affine_complex3");
  require_epsilon(epsilon);
  require_real(lambda, "lambda");
  if (beta == 0.0 || !std::isfinite(beta) || !std::isfinite(alpha))
    throw SpecError("affine_complex3: beta must be finite and nonzero");
  const double eps = epsilon;
  MetricPair p;
  p.kind = "affine_complex3";
  p.chart = chart;
  p.chart.add_exclusion({"lambda", [lambda](std::span<const double> q) { return lambda(q[0]); }});
  p.g = MetricField(3, [alpha, beta, lambda, eps](JetCoords x) {
    const RJet d = RJet(alpha) - lambda(x[0]);
    JetMatrix g(3);
    g(0, 0) = d * d + RJet(beta * beta);
    g(1, 1) = RJet(-beta);
    g(1, 2) = d;
    g(2, 1) = d;
    g(2, 2) = RJet(beta);
    return g * RJet(eps);
  });
  p.L = EndoField(3, [alpha, beta, lambda](JetCoords x) {
    JetMatrix L(3);
    L(0, 0) = lambda(x[0]);
    L(1, 1) = RJet(alpha);
    L(1, 2) = RJet(beta);
    L(2, 1) = RJet(-beta);
    L(2, 2) = RJet(alpha);
    return L;
  });
  return p;
}

MetricPair aminova_pair(const ParamFn& omega, const Chart& chart) {
  require_dim(chart, 4, "aminova");
  require_real(omega, "omega");
  if (lo_of(chart, 3) <= 0.0 && hi_of(chart, 3) >= 0.0) throw DomainError("aminova: chart touches x4 = 0");
  MetricPair p;
  p.kind = "aminova";
  p.chart = chart;
  p.chart.add_exclusion({"x4", [](std::span<const double> q) { return q[3]; }});
  p.g = MetricField(4, [omega](JetCoords x) {
    const RJet w = omega(x[3]);
    JetMatrix g(4);
    g(0, 3) = g(3, 0) = RJet(3.0) * x[2] + RJet(3.0) * w;
    g(1, 2) = g(2, 1) = RJet(1.0);
    g(1, 3) = g(3, 1) = RJet(2.0) * x[1];
    g(2, 3) = g(3, 2) = x[0];
    g(3, 3) = RJet(4.0) * x[0] * x[1];
    return g;
  });
  p.gbar = MetricField(4, [omega](JetCoords x) {
    const RJet w = omega(x[3]);
    const RJet x4 = x[3];
    const RJet p5 = x4 * x4 * x4 * x4 * x4, p6 = p5 * x4, p7 = p6 * x4, p8 = p7 * x4;
    const RJet s = RJet(3.0) * x[2] + RJet(3.0) * w;  // 3 x3 + 3 omega
    const RJet u = RJet(2.0) * x[1] * x4;            // 2 x2 x4
    const RJet q = RJet(2.0) * x[0] * x4 * x4;       // 2 x1 x4^2
    JetMatrix g(4);
    g(0, 3) = g(3, 0) = s / p5;
    g(1, 2) = g(2, 1) = RJet(2.0) / p5;
    g(1, 3) = g(3, 1) = (u - s) / p6;
    g(2, 2) = RJet(-1.0) / p6;
    g(2, 3) = g(3, 2) = (s - u + x[0] * x4 * x4) / p7;
    g(3, 3) = (u - s) * (q + s - u) / p8;
    return g;
  });
  p.L = projective_L_field(p.g, *p.gbar);
  return p;
}

std::size_t spec_dimension(const NormalFormSpec& s) {
  if (s.kind == "dini") return 2;
  if (s.kind == "levicivita3" || s.kind == "affine_complex3") return 3;
  if (s.kind == "aminova") return 4;
  if (s.kind == "interval") return 1;
  if (s.kind == "real_jordan" || s.kind == "real_jordan_normalized") return s.n;
  if (s.kind == "complex_jordan" || s.kind == "complex_jordan_normalized") return 2 * s.n;
  throw SpecError("unknown normal form kind '" + s.kind + "'");
}

Chart default_chart(const NormalFormSpec& s) {
  const std::size_t d = spec_dimension(s);
  if (d == 0 || d > kMaxDim) throw SpecError("normal form dimension must be between 1 and 8");
  std::vector<std::pair<double, double>> box(d, {-1.0, 1.0});
  if (s.kind == "aminova") box = {{0.0, 2.0}, {0.0, 2.0}, {0.0, 2.0}, {1.0, 2.0}};
  return Chart(box);
}

namespace {

const ParamFn& param(const NormalFormSpec& s, const std::string& name) {
  auto it = s.params.find(name);
  if (it == s.params.end()) throw SpecError(s.kind + ": missing parameter '" + name + "'");
  return it->second;
}

ParamFn param_or(const NormalFormSpec& s, const std::string& name, ParamFn fallback) {
  auto it = s.params.find(name);
  return it == s.params.end() ? fallback : it->second;
}

double scalar(const NormalFormSpec& s, const std::string& name) {
  auto it = s.scalars.find(name);
  if (it == s.scalars.end()) throw SpecError(s.kind + ": missing scalar parameter '" + name + "'");
  return it->second;
}

}  // namespace

MetricPair generate(const NormalFormSpec& s) {
  const Chart chart = s.chart ? *s.chart : default_chart(s);
  if (chart.dim() != spec_dimension(s)) throw SpecError(s.kind + ": chart dimension does not match the normal form");
  if (s.kind == "dini") return dini_pair(param(s, "X"), param(s, "Y"), chart, s.epsilon);
  if (s.kind == "levicivita3") return levicivita3_pair(param(s, "X"), param(s, "Y"), param(s, "Z"), chart, s.epsilon);
  if (s.kind == "interval") return interval_pair(param(s, "X"), chart, s.epsilon);
  if (s.kind == "real_jordan") return real_jordan_pair(s.n, param(s, "lambda"), chart, s.epsilon);
  if (s.kind == "real_jordan_normalized")
    return real_jordan_normalized_pair(s.n, param(s, "h"), chart, s.epsilon, s.corner);
  if (s.kind == "complex_jordan") return complex_jordan_pair(s.n, param(s, "lambda"), chart, s.epsilon);
  if (s.kind == "complex_jordan_normalized")
    return complex_jordan_normalized_pair(s.n, param(s, "h"), chart, s.epsilon, s.corner);
  if (s.kind == "affine_complex3")
    return affine_complex3_pair(scalar(s, "alpha"), scalar(s, "beta"), param(s, "lambda"), chart, s.epsilon);
  if (s.kind == "aminova") return aminova_pair(param_or(s, "omega", ParamFn::constant(0.0, 3)), chart);
  throw SpecError("unknown normal form kind '" + s.kind + "'");
}

}  // namespace geodeq
