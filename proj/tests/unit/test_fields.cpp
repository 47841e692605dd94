#include <doctest.h>

#include <cmath>
#include <random>

#include "geodeq/fields.hpp"
#include "geodeq/normalforms.hpp"
#include "oracles.hpp"

using namespace geodeq;

namespace {

// Symmetric field with entries c0 + c1 x_a + c2 x_b^2, diagonally dominant
// on [-1, 1]^n so it stays invertible.
MetricField random_metric(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  std::uniform_int_distribution<std::size_t> v(0, n - 1);
  struct Entry {
    double c0, c1, c2;
    std::size_t a, b;
  };
  std::vector<Entry> e(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      e[i * n + j] = {d(rng), d(rng), d(rng), v(rng), v(rng)};
      if (i == j) e[i * n + j].c0 = (i % 2 == 0 ? 1.0 : -1.0) * (3.0 + std::abs(e[i * n + j].c0));
    }
  return MetricField(n, [n, e](JetCoords x) {
    JetMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto& c = e[std::min(i, j) * n + std::max(i, j)];
        m(i, j) = RJet(c.c0) + RJet(c.c1) * x[c.a] + RJet(c.c2) * x[c.b] * x[c.b];
      }
    return m;
  });
}

// g-self-adjoint L = g^{-1} S with S symmetric and dominant.
EndoField random_selfadjoint(std::mt19937_64& rng, const MetricField& g) {
  const MetricField S = random_metric(rng, g.dim());
  return EndoField(g.dim(), [g, S](JetCoords x) { return inverse(g(x)) * S(x); });
}

}  // namespace

TEST_CASE("parameter function validation") {
  CHECK_THROWS_AS(ParamFn::real(0, std::vector<double>(14, 1.0)), SpecError);
  CHECK_NOTHROW(ParamFn::real(0, std::vector<double>(13, 1.0)));
  CHECK_THROWS_AS(ParamFn::real(0, {1.0, std::nan("")}), SpecError);
  CHECK_THROWS_AS(ParamFn::real(0, {INFINITY}), SpecError);
  const ParamFn z(0, {cplx(0, 1)});
  CHECK(z.is_complex());
  CHECK_THROWS_AS(z(1.0), SpecError);
  const auto f = ParamFn::real(2, {1, 0, 3});
  CHECK(f(2.0) == 13.0);
  CHECK(f.derivative()(2.0) == 12.0);
  CHECK(f.var() == 2);
}

TEST_CASE("projective L examples") {
  const MetricField g(2, [](JetCoords) { return JetMatrix{{RJet(1.0), RJet()}, {RJet(), RJet(1.0)}}; });
  const double p[] = {0.2, -0.1};
  CHECK(max_abs(projective_L(g, g, p) - RMatrix::identity(2)) < 1e-15);

  const Chart chart({{-1, 1}, {-1, 1}});
  const auto dini = dini_pair(ParamFn::constant(1.0, 0), ParamFn::constant(2.0, 1), chart);
  CHECK(max_abs(dini.g.value_at(p) - RMatrix::identity(2)) == 0.0);
  CHECK(max_abs(dini.gbar->value_at(p) - RMatrix{{0.5, 0}, {0, 0.25}}) < 1e-15);
  CHECK(max_abs(projective_L(dini.g, *dini.gbar, p) - RMatrix{{1, 0}, {0, 2}}) < 1e-14);
}

TEST_CASE("projective L agrees with the G-relation") {
  std::mt19937_64 rng(43);
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto g = random_metric(rng, n), gb = random_metric(rng, n);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = oracle::random_point(rng, n);
      const RMatrix G = inverse(g.value_at(p)) * gb.value_at(p);
      const RMatrix expect = inverse(G) * std::pow(std::abs(det(G)), 1.0 / double(n + 1));
      const RMatrix L = projective_L(g, gb, p);
      CHECK(max_abs(L - expect) <= 1e-12 * (1 + max_abs(expect)));
      CHECK(max_abs(values(projective_L_field(g, gb).at(p)) - L) <= 1e-12 * (1 + max_abs(L)));
    }
  }
}

TEST_CASE("companion metric round trip and determinant bookkeeping") {
  std::mt19937_64 rng(47);
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto g = random_metric(rng, n);
    const auto L = random_selfadjoint(rng, g);
    const auto gb = companion_metric(g, L);
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = oracle::random_point(rng, n);
      const RMatrix Lp = L.value_at(p);
      CHECK(max_abs(projective_L(g, gb, p) - Lp) <= 1e-10 * (1 + max_abs(Lp)));
      const double lhs = std::abs(det(gb.value_at(p)) / det(g.value_at(p)));
      const double rhs = std::pow(std::abs(det(Lp)), -double(n + 1));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * rhs);
      // The unsymmetrized companion is already symmetric when gL is.
      const RMatrix raw = g.value_at(p) * inverse(Lp);
      CHECK(max_abs(raw - raw.transpose()) <= 1e-13 * (1 + max_abs(raw)));
    }
    // The other direction: g, gbar -> L -> gbar.
    const auto gb2 = random_metric(rng, n);
    const auto L2 = projective_L_field(g, gb2);
    const auto back = companion_metric(g, L2);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = oracle::random_point(rng, n);
      const RMatrix expect = gb2.value_at(p);
      CHECK(max_abs(back.value_at(p) - expect) <= 1e-10 * (1 + max_abs(expect)));
    }
  }
  const MetricField g(2, [](JetCoords x) { return JetMatrix{{x[0] + RJet(3.0), RJet()}, {RJet(), RJet(-2.0)}}; });
  const EndoField I(2, [](JetCoords) { return JetMatrix::identity(2); });
  const double p[] = {0.5, 0.5};
  CHECK(max_abs(companion_metric(g, I).value_at(p) - g.value_at(p)) == 0.0);
}

TEST_CASE("Dini second metric matches the closed form") {
  const auto X = ParamFn::real(0, {1, 0, 0.1}), Y = ParamFn::real(1, {3, 0, 0.1});
  const auto pair = dini_pair(X, Y, Chart({{-1, 1}, {-1, 1}}));
  const auto gb = companion_metric(pair.g, pair.L);
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = oracle::random_point(rng, 2);
    const double x = X(p[0]), y = Y(p[1]);
    const double f = 1 / x - 1 / y;
    const RMatrix expect{{f / x, 0}, {0, f / y}};
    CHECK(max_abs(gb.value_at(p) - expect) < 1e-14);
    CHECK(max_abs(pair.gbar->value_at(p) - expect) < 1e-14);
  }
}

TEST_CASE("jet evaluation of fields") {
  const MetricField c(3, [](JetCoords) {
    JetMatrix m = JetMatrix::identity(3);
    m(0, 1) = m(1, 0) = RJet(0.5);
    return m;
  });
  const double p[] = {0.1, 0.2, 0.3};
  const auto m = c.at(p);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) CHECK(m(i, j).grad(k) == 0.0);

  const auto X = ParamFn::real(0, {1, 0.5, 0.1}), Y = ParamFn::real(1, {4, -0.3, 0.2});
  const Chart chart({{-1, 1}, {-1, 1}});
  const auto dini = dini_pair(X, Y, chart);
  const double q[] = {0.4, -0.6};
  const auto g = eval_with_jets(dini.g, dini.chart, q);
  CHECK(g(0, 0).value() == doctest::Approx(Y(q[1]) - X(q[0])).epsilon(1e-15));
  CHECK(g(0, 0).grad(0) == doctest::Approx(-X.derivative()(q[0])).epsilon(1e-15));
  CHECK(g(0, 0).grad(1) == doctest::Approx(Y.derivative()(q[1])).epsilon(1e-15));

  const double out[] = {1.5, 0.0};
  CHECK_THROWS_AS(eval_with_jets(dini.g, dini.chart, out), DomainError);

  Chart ex({{-1, 1}});
  ex.add_exclusion({"x", [](std::span<const double> s) { return s[0]; }});
  const auto f = MetricField(1, [](JetCoords x) { return JetMatrix{{x[0]}}; });
  const double zero[] = {0.0};
  try {
    eval_with_jets(f, ex, zero);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("'x'") != std::string::npos);
  }
}

TEST_CASE("jet gradients match finite differences on random fields") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 3;
    const auto g = random_metric(rng, n);
    const auto L = random_selfadjoint(rng, g);
    const auto p = oracle::random_point(rng, n, -0.9, 0.9);
    for (const TensorField* f : {static_cast<const TensorField*>(&g), static_cast<const TensorField*>(&L)}) {
      const auto J = f->at(p);
      const auto fd = oracle::finite_difference(*f, p);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double a = J(i, j).grad(k), b = fd[k](i, j);
            CHECK(std::abs(a - b) <= 1e-7 * (1 + std::abs(b)));
          }
    }
  }
}

TEST_CASE("chart sampling") {
  Chart c({{0, 1}, {-2, 2}});
  CHECK(c.box_scale() == 4.0);
  CHECK(c.center() == Point{0.5, 0.0});
  const auto a = c.sample(50, 9), b = c.sample(50, 9), d = c.sample(50, 10);
  CHECK(a.points == b.points);
  CHECK(a.points != d.points);
  for (const auto& p : a.points) CHECK(c.in_box(p));

  // Half of the box excluded: most seeds still collect, rejections are counted.
  Chart half({{-1, 1}});
  half.add_exclusion({"neg", [](std::span<const double> s) { return s[0] < 0 ? 0.0 : 1.0; }});
  Chart mostly({{-1, 1}});
  mostly.add_exclusion({"most", [](std::span<const double> s) { return s[0] < 0.8 ? 0.0 : 1.0; }});
  CHECK_THROWS_AS(mostly.sample(20, 1), DomainError);
  std::size_t rejected = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    try {
      const auto s = half.sample(40, seed);
      rejected += s.rejected;
      for (const auto& p : s.points) CHECK(p[0] >= 0);
    } catch (const DomainError&) {
    }
  }
  CHECK(rejected > 0);

  CHECK_THROWS_AS(Chart({{1, 0}}), SpecError);
  CHECK_THROWS_AS(Chart(std::vector<std::pair<double, double>>{}), SpecError);
  CHECK_THROWS_AS(Chart({{0, 1}}, 0.0), SpecError);
}

TEST_CASE("product chart reindexes exclusions") {
  Chart a({{-1, 1}});
  a.add_exclusion({"a", [](std::span<const double> s) { return s[0]; }});
  Chart b({{2, 3}, {-1, 1}});
  b.add_exclusion({"b", [](std::span<const double> s) { return s[1]; }});
  const Chart p = Chart::product({a, b});
  CHECK(p.dim() == 3);
  const double q1[] = {0.0, 2.5, 0.5}, q2[] = {0.5, 2.5, 0.0}, q3[] = {0.5, 2.5, 0.5};
  CHECK(p.excluded_by(q1) == std::optional<std::string>("a"));
  CHECK(p.excluded_by(q2) == std::optional<std::string>("b"));
  CHECK_FALSE(p.excluded_by(q3).has_value());
}
