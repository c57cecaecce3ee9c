#include <doctest.h>

#include "ttofs/hardy.hpp"
#include "ttofs/linalg.hpp"

#include <cmath>
#include <random>

using namespace ttofs;

namespace {

Symbol random_polynomial(std::mt19937_64& rng, int degree) {
  std::map<int, Complex> c;
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  for (int j = -degree; j <= degree; ++j) c[j] = Complex(unit(), unit());
  return Symbol(c);
}

}  // namespace

TEST_CASE("grid quadrature is exact below M") {
  const CircleGrid g(16);
  for (long j = -15; j < 16; ++j) CHECK(std::abs(g.quadrature_of_power(j) - (j == 0 ? 1.0 : 0.0)) < 1e-15);
  CHECK(std::abs(g.quadrature_of_power(16) - 1.0) < 1e-15);
  CHECK(CircleGrid::for_window(100).size() == 1024);
  CHECK_THROWS_AS(CircleGrid(1), DomainError);
}

TEST_CASE("analysis of trigonometric polynomials") {
  const CircleGrid g(64);
  const Symbol a = analyze([](Complex t) { return 2.0 + t + 1.0 / t; }, g, 8);
  CHECK(std::abs(a.coeff(-1) - 1.0) < 1e-15);
  CHECK(std::abs(a.coeff(0) - 2.0) < 1e-15);
  CHECK(std::abs(a.coeff(1) - 1.0) < 1e-15);
  for (int j = 2; j <= 8; ++j) CHECK(std::abs(a.coeff(j)) + std::abs(a.coeff(-j)) < 1e-15);

  const Symbol c = analyze([](Complex t) { return t * t * t; }, g, 8);
  CHECK(std::abs(c.coeff(3) - 1.0) < 1e-15);
  CHECK(c.l1_norm() < 1.0 + 1e-14);

  std::mt19937_64 rng(1);
  const Symbol p = random_polynomial(rng, 8);
  const Symbol back = analyze(p.samples().size() == 64 ? p.samples() : p.evaluate(g), g, 8);
  CHECK((back.coefficients() - p.coefficients()).cwiseAbs().maxCoeff() < 1e-13);

  CHECK_THROWS_AS(analyze([](Complex t) { return t; }, g, 32), DomainError);
}

TEST_CASE("adaptive analysis of smooth symbols") {
  const auto f = [](Complex t) { return std::exp(t.real()) * Complex(1.0, 0.0); };
  const Symbol a = analyze(f, 24);
  CHECK(a.tail_bound() < 1e-12);
  // exp(cos θ) has coefficients I_j(1); check I_0(1).
  CHECK(std::abs(a.coeff(0) - 1.2660658777520082) < 1e-14);
  CHECK(a.is_real_valued());
  CHECK(std::abs(a(Complex(1.0, 0.0)) - std::exp(1.0)) < 1e-14);
}

TEST_CASE("flip and conjugate") {
  const Symbol t = Symbol::monomial(1);
  const Symbol ft = flip(t);
  CHECK(ft.coeff(-1) == Complex(1.0, 0.0));
  CHECK(ft.coeff(1) == Complex(0.0, 0.0));
  std::mt19937_64 rng(2);
  const Symbol p = random_polynomial(rng, 5);
  CHECK((flip(flip(p)).coefficients() - p.coefficients()).cwiseAbs().maxCoeff() == 0.0);
  const Symbol r(std::map<int, Complex>{{-2, {0.5, 1.0}}, {0, 3.0}, {2, {0.5, -1.0}}});
  CHECK(r.is_real_valued());
  CHECK(flip(r).is_real_valued());
  CHECK_FALSE(p.is_real_valued());
  const Symbol cp = conjugate(p);
  for (int j = -5; j <= 5; ++j) CHECK(cp.coeff(j) == std::conj(p.coeff(-j)));
  // Samples flip consistently: ã(t_m) = a(t_{−m}).
  const Symbol fp = flip(p);
  for (std::size_t i = 0; i < p.grid().size(); i += 7) {
    CHECK(std::abs(fp.samples()[static_cast<Eigen::Index>(i)] - p(1.0 / p.grid().point(i))) < 1e-13);
  }
}

TEST_CASE("Toeplitz and Hankel matrices") {
  const Matrix s = toeplitz_matrix(Symbol::monomial(1), 4).entries;
  Matrix shift = Matrix::Zero(4, 4);
  for (int i = 1; i < 4; ++i) shift(i, i - 1) = 1.0;
  CHECK((s - shift).cwiseAbs().maxCoeff() == 0.0);
  CHECK((toeplitz_matrix(Symbol::constant(1.0), 5).entries - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
  const Matrix tri = toeplitz_matrix(Symbol(std::map<int, Complex>{{-1, 1.0}, {0, 2.0}, {1, 1.0}}), 3).entries;
  Matrix expected(3, 3);
  expected << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  CHECK((tri - expected).cwiseAbs().maxCoeff() == 0.0);

  const std::size_t n = 3;
  const Matrix rn = hankel_matrix(Symbol::monomial(static_cast<int>(n)), 6).entries;
  for (Eigen::Index j = 0; j < 6; ++j)
    for (Eigen::Index k = 0; k < 6; ++k) CHECK(rn(j, k) == (j + k == static_cast<Eigen::Index>(n) - 1 ? Complex(1.0, 0.0) : Complex(0.0, 0.0)));
  Matrix pn = Matrix::Zero(6, 6);
  pn.topLeftCorner(3, 3).setIdentity();
  CHECK((rn * rn - pn).cwiseAbs().maxCoeff() == 0.0);
  CHECK((rn - rn.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(hankel_matrix(Symbol::monomial(-1), 5).entries.cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(4);
  const Symbol p = random_polynomial(rng, 6);
  CHECK((hankel_matrix(p, 8).entries.adjoint() - hankel_matrix(conjugate(flip(p)), 8).entries).cwiseAbs().maxCoeff() == 0.0);

  const Symbol smooth = analyze([](Complex t) { return 1.0 / (2.0 - t); }, 8);
  CHECK(toeplitz_matrix(smooth, 16).tail_warning);
  CHECK_FALSE(toeplitz_matrix(smooth, 8).tail_warning);
  CHECK(hankel_matrix(smooth, 8).tail_warning);
}

TEST_CASE("classical Widom identity") {
  const Symbol t = Symbol::monomial(1);
  CHECK(classical_widom_residual(t, t, 4, 8).spectral < 1e-14);
  CHECK(classical_widom_residual(t, Symbol::monomial(-1), 4, 8).spectral < 1e-14);
  // P T(t) P T(t⁻¹) P on 4 modes leaves diag(1,0,0,0) against P T(1) P.
  const Matrix p4 = toeplitz_matrix(Symbol::constant(1.0), 4).entries -
                    toeplitz_matrix(t, 4).entries * toeplitz_matrix(Symbol::monomial(-1), 4).entries;
  Matrix e00 = Matrix::Zero(4, 4);
  e00(0, 0) = 1.0;
  CHECK((p4 - e00).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const Symbol a = random_polynomial(rng, 5);
    const Symbol b = random_polynomial(rng, 5);
    const auto r = classical_widom_residual(a, b, 16, 64);
    CHECK(r.spectral < 1e-10);
    CHECK_FALSE(r.truncation_flag);
  }
  const Symbol a = random_polynomial(rng, 5);
  CHECK(classical_widom_residual(a, a, 16, 20).truncation_flag);
}
