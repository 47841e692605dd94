#include <doctest.h>

#include <random>

#include "geodeq/linalg.hpp"
#include "oracles.hpp"

using namespace geodeq;

namespace {

RMatrix random_int_matrix(std::mt19937_64& rng, std::size_t n, int lo = -5, int hi = 5) {
  std::uniform_int_distribution<int> d(lo, hi);
  RMatrix A(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A(i, j) = d(rng);
  return A;
}

RMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-1, 1);
  RMatrix A(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) A(i, j) = d(rng);
  return A;
}

}  // namespace

TEST_CASE("adjugate small cases") {
  CHECK(max_abs(adjugate(RMatrix::identity(3)) - RMatrix::identity(3)) == 0.0);
  const RMatrix A{{1, 2}, {3, 4}};
  const RMatrix expect{{4, -2}, {-3, 1}};
  CHECK(max_abs(adjugate(A) - expect) == 0.0);
  CHECK(det(A) == -2.0);
}

TEST_CASE("adjugate matches cofactor expansion exactly on integer matrices") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const RMatrix A = random_int_matrix(rng, 4);
    const auto adj = adjugate(A);
    const auto ref = oracle::cofactor_adjugate(oracle::to_dense(A));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(adj(i, j) == ref[i][j]);
    CHECK(det(A) == oracle::laplace_det(oracle::to_dense(A)));
    CHECK(max_abs(A * adj - RMatrix::identity(4) * det(A)) == 0.0);
    CHECK(max_abs(adj * A - RMatrix::identity(4) * det(A)) == 0.0);
  }
}

TEST_CASE("adjugate identity holds for rank-deficient matrices") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    RMatrix A = random_int_matrix(rng, 4);
    for (std::size_t j = 0; j < 4; ++j) A(3, j) = A(0, j) + 2 * A(1, j);
    CHECK(det(A) == 0.0);
    const auto adj = adjugate(A);
    CHECK(max_abs(A * adj) == 0.0);
    const auto ref = oracle::cofactor_adjugate(oracle::to_dense(A));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(adj(i, j) == ref[i][j]);
  }
}

TEST_CASE("characteristic polynomial") {
  auto c = char_poly(RMatrix::identity(2)).coeffs;
  CHECK(c == std::vector<double>{1, -2, 1});
  c = char_poly(RMatrix{{3, 1}, {0, 3}}).coeffs;
  CHECK(c == std::vector<double>{9, -6, 1});

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const RMatrix A = random_matrix(rng, 4);
    const auto p = char_poly(A).coeffs;
    const auto ref = oracle::symbolic_char_poly(oracle::to_dense(A));
    REQUIRE(ref.size() == p.size());
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(std::abs(p[k] - ref[k]) <= 1e-12 * (1 + std::abs(ref[k])));
  }
}

TEST_CASE("char_poly of a companion matrix returns the polynomial") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(-3, 3);
  for (std::size_t n = 1; n <= 8; ++n) {
    std::vector<double> a(n);
    for (auto& v : a) v = d(rng);
    RMatrix C(n);
    for (std::size_t i = 1; i < n; ++i) C(i, i - 1) = 1;
    for (std::size_t i = 0; i < n; ++i) C(i, n - 1) = -a[i];
    const auto p = char_poly(C).coeffs;
    for (std::size_t k = 0; k < n; ++k) CHECK(p[k] == doctest::Approx(a[k]).epsilon(1e-12));
    CHECK(p[n] == 1.0);
  }
}

TEST_CASE("polynomial roots") {
  auto r = poly_roots(Poly<double>{{1, 0, 1}});
  REQUIRE(r.size() == 2);
  std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  CHECK(std::abs(r[0] - cplx(0, -1)) < 1e-14);
  CHECK(std::abs(r[1] - cplx(0, 1)) < 1e-14);

  r = poly_roots(Poly<double>{{9, -6, 1}});
  const auto cl = spectral_cluster(r, 1e-6);
  REQUIRE(cl.size() == 1);
  CHECK(cl[0].multiplicity == 2);
  CHECK(std::abs(cl[0].value - 3.0) < 1e-7);

  CHECK_THROWS(poly_roots(Poly<double>{{1.0}}));
}

TEST_CASE("degree-5 roots reproduce the coefficients (Vieta)") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> d(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c(6);
    for (auto& v : c) v = d(rng);
    c[5] = 1 + std::abs(c[5]);
    const auto roots = poly_roots(Poly<double>{c});
    REQUIRE(roots.size() == 5);
    const auto rebuilt = oracle::poly_from_roots(roots);
    double scale = 0;
    for (double v : c) scale = std::max(scale, std::abs(v / c[5]));
    for (std::size_t k = 0; k < 6; ++k) CHECK(std::abs(rebuilt[k] - c[k] / c[5]) <= 1e-8 * scale);
    // Conjugate symmetry of the output multiset.
    for (const auto& z : roots) {
      bool found = false;
      for (const auto& w : roots) found = found || w == std::conj(z);
      CHECK(found);
    }
  }
}

TEST_CASE("spectral clustering") {
  auto cl = spectral_cluster({3.0, 3.0 + 1e-12}, 1e-9);
  REQUIRE(cl.size() == 1);
  CHECK(cl[0].multiplicity == 2);
  CHECK(cl[0].kind == ClusterKind::real);

  cl = spectral_cluster({cplx(1, 2), cplx(1, -2), 5.0});
  REQUIRE(cl.size() == 2);
  int pairs = 0, reals = 0, total = 0;
  for (const auto& c : cl) {
    if (c.kind == ClusterKind::conjugate_pair) {
      ++pairs;
      CHECK(c.value.imag() > 0);
      CHECK(c.multiplicity == 1);
      total += 2 * c.multiplicity;
    } else {
      ++reals;
      total += c.multiplicity;
    }
  }
  CHECK(pairs == 1);
  CHECK(reals == 1);
  CHECK(total == 3);
}

TEST_CASE("matrix functions") {
  const TargetFn identity = [](cplx z, int order) -> cplx { return order == 0 ? z : (order == 1 ? 1.0 : 0.0); };
  std::mt19937_64 rng(31);
  const RMatrix A = random_matrix(rng, 4);
  CHECK(max_abs(real_part(matrix_function(A, identity)) - A) < 1e-12);

  const RMatrix R{{0, -1}, {1, 0}};
  CHECK(max_abs(real_part(matrix_function(R, identity)) - R) < 1e-14);

  const RMatrix D{{1, 0}, {0, 2}};
  const TargetFn scale10 = [](cplx z, int order) -> cplx { return order == 0 ? 10.0 * z : (order == 1 ? 10.0 : 0.0); };
  CHECK(max_abs(real_part(matrix_function(D, scale10)) - RMatrix{{10, 0}, {0, 20}}) < 1e-12);

  // Polynomial targets equal direct evaluation, including Jordan blocks.
  const Poly<double> p{{0.5, -2, 0, 1}};
  const TargetFn pf = [p](cplx z, int order) -> cplx {
    Poly<cplx> q{{p.coeffs.begin(), p.coeffs.end()}};
    for (int k = 0; k < order; ++k) q = q.derivative();
    return q(z);
  };
  for (int trial = 0; trial < 20; ++trial) {
    const RMatrix B = random_matrix(rng, 4);
    CHECK(max_abs(real_part(matrix_function(B, pf)) - eval_matrix(p, B)) < 1e-10);
  }
  const RMatrix J{{2, 1, 0}, {0, 2, 1}, {0, 0, 2}};
  CHECK(max_abs(real_part(matrix_function(J, pf)) - eval_matrix(p, J)) < 1e-10);
}

TEST_CASE("matrix_function matches eigendecomposition") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> d(-1, 1);
  const TargetFn f = [](cplx z, int order) -> cplx {
    const cplx u = 1.0 / (z + 5.0);
    return order == 0 ? u : -u * u;
  };
  for (int trial = 0; trial < 100; ++trial) {
    // Real spectrum {1, 2, 3, 4} plus a conjugate pair for half the trials.
    const bool complex_pair = trial % 2 == 1;
    std::vector<std::vector<cplx>> V(4, std::vector<cplx>(4));
    for (auto& row : V)
      for (auto& v : row) v = d(rng);
    std::vector<cplx> eig{1.0, 2.0, 3.0, 4.0};
    if (complex_pair) {
      const cplx z(1.5, 0.75);
      eig = {1.0, 3.0, z, std::conj(z)};
      for (std::size_t i = 0; i < 4; ++i) {
        const cplx a = V[i][2];
        V[i][2] = cplx(a.real(), d(rng));
        V[i][3] = std::conj(V[i][2]);
      }
    }
    const auto Ac = oracle::from_eigen(V, eig);
    RMatrix A(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) A(i, j) = Ac[i][j].real();
    std::vector<cplx> fe;
    for (const auto& z : eig) fe.push_back(f(z, 0));
    const auto ref = oracle::from_eigen(V, fe);
    const auto got = matrix_function(A, f);
    double err = 0, scale = 0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        err = std::max(err, std::abs(got(i, j) - ref[i][j]));
        scale = std::max(scale, std::abs(ref[i][j]));
      }
    CHECK(err <= 1e-9 * (1 + scale));
  }
}

TEST_CASE("canonical complex structure") {
  const RMatrix J0{{0, -1}, {1, 0}};
  CHECK(max_abs(complex_structure_J(J0) - J0) < 1e-14);
  const RMatrix A = RMatrix::identity(2) * 3.0 + J0 * 0.5;
  CHECK(max_abs(complex_structure_J(A) - J0) < 1e-12);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    // Random real matrix with two conjugate pairs via a similarity transform.
    RMatrix B(4);
    B(0, 0) = B(1, 1) = d(rng);
    B(0, 1) = -(B(1, 0) = 0.5 + std::abs(d(rng)));
    B(2, 2) = B(3, 3) = d(rng) + 3;
    B(2, 3) = -(B(3, 2) = -(0.5 + std::abs(d(rng))));
    RMatrix S(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) S(i, j) = (i == j ? 2.0 : 0.0) + d(rng) * 0.5;
    const RMatrix M = S * B * inverse(S);
    const RMatrix J = complex_structure_J(M);
    CHECK(max_abs(J * J + RMatrix::identity(4)) < 1e-10);
    CHECK(max_abs(J * M - M * J) < 1e-10);
    CHECK(max_abs(complex_structure_J(M.shifted(0.25)) - J) < 1e-10);
  }
  CHECK_THROWS_AS(complex_structure_J(RMatrix{{1, 0}, {0, 2}}), SpectralError);
  CHECK_THROWS_AS(complex_structure_J(RMatrix::identity(3)), SpectralError);
}

TEST_CASE("jet matrix function carries exact first derivatives") {
  // f(L(s)) with L(s) = L0 + s E, compared with central differences in s.
  const RMatrix L0{{1, -2}, {1.5, 0.5}};
  const RMatrix E{{0.3, 0.1}, {-0.2, 0.4}};
  const double s0[] = {0.0};
  const RJet s = RJet::variable(s0, 0);
  JetMatrix L(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) L(i, j) = RJet(L0(i, j)) + s * RJet(E(i, j));
  const JetMatrix J = complex_structure_J(L);
  const double h = 1e-6;
  const RMatrix dJ = (complex_structure_J(L0 + E * h) - complex_structure_J(L0 - E * h)) * (1 / (2 * h));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(J(i, j).grad(0) - dJ(i, j)) < 1e-7);
}

TEST_CASE("inverse rejects singular matrices") {
  CHECK_THROWS_AS(inverse(RMatrix{{1, 2}, {2, 4}}), SingularError);
  const RMatrix A{{4, 1}, {2, 3}};
  CHECK(max_abs(A * inverse(A) - RMatrix::identity(2)) < 1e-15);
}

TEST_CASE("multiple eigenvalues are located to near machine precision") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const double lam = 1 + d(rng), mu = 5 + d(rng);
    RMatrix B(4);
    B(0, 0) = B(1, 1) = B(2, 2) = lam;
    B(0, 1) = B(1, 2) = 1;
    B(3, 3) = mu;
    RMatrix S(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) S(i, j) = (i == j ? 2.0 : 0.0) + 0.5 * d(rng);
    const auto clusters = matrix_spectrum(S * B * inverse(S));
    REQUIRE(clusters.size() == 2);
    for (const auto& c : clusters) {
      const double expect = c.multiplicity == 3 ? lam : mu;
      CHECK(std::abs(c.value - expect) <= 1e-11 * (1 + std::abs(expect)));
    }
  }
}
