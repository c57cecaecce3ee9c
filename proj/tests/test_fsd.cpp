#include <doctest.h>

#include "ttofs/fsd.hpp"
#include "ttofs/linalg.hpp"

#include <cmath>

using namespace ttofs;

namespace {

Symbol positive_symbol() { return Symbol(std::map<int, Complex>{{-1, 0.5}, {0, 2.0}, {1, 0.5}}); }

SequenceSpec plain(BlaschkeProduct u, Symbol a) { return SequenceSpec{std::move(u), std::move(a), {}, {}}; }

Vector unit(std::size_t k, std::size_t n) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
  v[static_cast<Eigen::Index>(k)] = 1.0;
  return v;
}

// A = T_u(a)(I − Σ f f^*) over orthonormal TM vectors f.
SequenceSpec kernel_spec(std::size_t rank) {
  SequenceSpec spec = plain(BlaschkeProduct::geometric(0.5), positive_symbol());
  for (std::size_t k = 0; k < rank; ++k) spec.compact.push_back({Complex(-1.0, 0.0), unit(k, rank), unit(k, rank), positive_symbol()});
  return spec;
}

}  // namespace

TEST_CASE("build_section") {
  const auto u = BlaschkeProduct::geometric(0.5);
  const auto spec = plain(u, positive_symbol());
  CHECK((build_section(spec, 12) - tto_matrix(u, 12, positive_symbol(), CircleGrid(64)).entries).cwiseAbs().maxCoeff() == 0.0);

  SequenceSpec rank_one = plain(u, Symbol::constant(0.0));
  rank_one.compact.push_back({Complex(0.5, -2.0), unit(0, 1), unit(0, 1), std::nullopt});
  const Matrix a = build_section(rank_one, 5);
  Matrix expected = Matrix::Zero(5, 5);
  expected(0, 0) = Complex(0.5, -2.0);
  CHECK((a - expected).cwiseAbs().maxCoeff() == 0.0);

  // Origin zeros: classical Toeplitz section plus a finite block.
  const auto origin = BlaschkeProduct::from_zeros(std::vector<Complex>(8, Complex(0.0, 0.0)));
  SequenceSpec classical = plain(origin, positive_symbol());
  Vector x(2);
  x << 1.0, Complex(0.0, 1.0);
  classical.compact.push_back({Complex(2.0, 0.0), x, x, std::nullopt});
  Matrix oracle = toeplitz_matrix(positive_symbol(), 8).entries;
  oracle.topLeftCorner(2, 2) += 2.0 * x * x.adjoint();
  CHECK((build_section(classical, 8) - oracle).cwiseAbs().maxCoeff() < 1e-15);

  // Rank-one kernel construction annihilates the first TM vector exactly.
  const Matrix k1 = build_section(kernel_spec(1), 10);
  CHECK(k1.col(0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("perturbations are seeded and decay") {
  Perturbation p{DecayRule::Geometric, 2.0, 0.5, 42};
  CHECK(std::abs(spectral_norm(p.sample(6)) - 2.0 * std::pow(0.5, 6)) < 1e-14);
  CHECK((p.sample(6) - p.sample(6)).cwiseAbs().maxCoeff() == 0.0);
  Perturbation q{DecayRule::Harmonic, 1.0, 0.0, 42};
  CHECK(std::abs(spectral_norm(q.sample(8)) - 0.125) < 1e-14);
  CHECK(Perturbation{}.sample(4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("stability probe") {
  const std::vector<std::size_t> ns{4, 8, 16, 32, 64};
  const auto stable = stability_probe(plain(BlaschkeProduct::geometric(0.5), positive_symbol()), ns, 0.5);
  CHECK(stable.verdict == StabilityVerdict::Stable);
  for (double s : stable.sigma_min_trace) CHECK(s >= 1.0 - 1e-10);
  REQUIRE(stable.certificate.has_value());
  CHECK(*stable.certificate <= 1.0);
  CHECK(*stable.certificate > 0.99);
  CHECK(stable.certificate_consistent);

  const BlaschkeProduct with_origin(AllZeroPrefix{1, GeometricRadius{0.5, {}}});
  const auto unstable = stability_probe(plain(with_origin, Symbol::monomial(1)), ns, 0.5);
  CHECK(unstable.verdict == StabilityVerdict::Unstable);
  for (double s : unstable.sigma_min_trace) CHECK(s < 1e-10);

  // Recorded only: the verdict depends on σ(u).
  const auto shift = stability_probe(plain(BlaschkeProduct::geometric(0.5), Symbol::monomial(1)), ns, 0.5);
  CHECK(shift.sigma_min_trace.size() == ns.size());

  CHECK_THROWS_AS(stability_probe(plain(with_origin, Symbol::monomial(1)), {4, 8}, 0.5), DomainError);
  CHECK_THROWS_AS(stability_probe(plain(with_origin, Symbol::monomial(1)), {4, 8, 8}, 0.5), DomainError);
}

TEST_CASE("spectra") {
  const auto id = spectra(Matrix::Identity(3, 3), SpectralMode::SelfAdjointEigen);
  REQUIRE(id.points.size() == 1);
  CHECK(id.points[0] == Complex(1.0, 0.0));

  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1.0;
  const auto sv = spectra(d, SpectralMode::Singular);
  REQUIRE(sv.points.size() == 2);
  CHECK(std::abs(sv.points[0]) < 1e-15);
  CHECK(std::abs(sv.points[1] - 1.0) < 1e-15);

  const Matrix a = tto_matrix(BlaschkeProduct::geometric(0.5), 24, positive_symbol(), CircleGrid(64)).entries;
  for (const auto& p : spectra(a, SpectralMode::SelfAdjointEigen).points) {
    CHECK(p.real() >= 1.0 - 1e-10);
    CHECK(p.real() <= 3.0 + 1e-10);
  }
  Matrix shift = Matrix::Zero(3, 3);
  shift(1, 0) = shift(2, 1) = 1.0;
  CHECK_THROWS_AS(spectra(shift, SpectralMode::SelfAdjointEigen), ModeError);
}

TEST_CASE("pseudospectra") {
  Matrix d = Matrix::Zero(2, 2);
  d(1, 1) = 1.0;
  const GridRect rect{-0.5, 1.5, -0.5, 0.5, 81, 41};
  const auto disks = pseudospectrum_grid(d, 0.25, rect);
  for (const auto& p : disks.set.points) CHECK(std::min(std::abs(p), std::abs(p - 1.0)) <= 0.25 + 1e-12);
  CHECK(disks.set.points.size() > 20);
  CHECK_FALSE(disks.coverage_warning);

  // Nonnormal: forward shift of size 4, checked against brute-force SVDs.
  Matrix s = Matrix::Zero(4, 4);
  for (int i = 1; i < 4; ++i) s(i, i - 1) = 1.0;
  const GridRect box = GridRect::square(1.2, 49);
  const auto ps = pseudospectrum_grid(s, 0.1, box);
  std::size_t expected = 0;
  for (std::size_t j = 0; j < box.ny; ++j) {
    for (std::size_t i = 0; i < box.nx; ++i) {
      const Complex z = box.point(i, j);
      const bool in = sigma_min(s - z * Matrix::Identity(4, 4)) <= 0.1;
      expected += in ? 1 : 0;
      if (std::abs(z) <= 0.5) CHECK(in);
    }
  }
  CHECK(ps.set.points.size() == expected);
  const auto grid = sigma_min_grid(s, box);
  CHECK(std::abs(grid[24 * 49 + 24]) < 1e-15);  // centre point is an eigenvalue

  const auto full = pseudospectrum_grid(d, 10.0, rect);
  CHECK(full.full_grid);
  CHECK(full.coverage_warning);

  // Monotone in eps.
  const auto small = pseudospectrum_grid(s, 0.05, box);
  CHECK(small.set.points.size() <= ps.set.points.size());
  for (const auto& p : small.set.points) CHECK(std::find(ps.set.points.begin(), ps.set.points.end(), p) != ps.set.points.end());

  // Threaded evaluation matches.
  const auto threaded = pseudospectrum_grid(s, 0.1, box, 4);
  CHECK(threaded.set.points == ps.set.points);
}

TEST_CASE("Hausdorff distance") {
  auto set = [](std::vector<Complex> p) { SpectralSet s; s.points = std::move(p); return s; };
  CHECK(hausdorff(set({0.0}), set({1.0})) == 1.0);
  CHECK(hausdorff(set({0.0, 2.0, Complex(0.0, 1.0)}), set({0.0, 2.0, Complex(0.0, 1.0)})) == 0.0);
  CHECK(hausdorff(set({0.0, 2.0}), set({1.0})) == 1.0);
  CHECK_THROWS_AS(hausdorff(set({}), set({1.0})), DomainError);
}

TEST_CASE("convergence report") {
  const auto finite = BlaschkeProduct::from_zeros({{0.3, 0.0}, {0.0, 0.5}, {-0.6, 0.2}, {0.4, 0.4}});
  const auto constant = convergence_report(plain(finite, positive_symbol()), {4}, 4, {0.1});
  for (const auto& t : constant.tracks) CHECK(t.distances.front() == 0.0);

  const auto rep = convergence_report(plain(BlaschkeProduct::geometric(0.5), positive_symbol()), {4, 8, 16, 32}, 64, {0.1});
  REQUIRE(rep.tracks.size() == 3);
  CHECK_FALSE(rep.eigen_track_skipped);
  for (const auto& t : rep.tracks) CHECK(t.nonincreasing);
  CHECK(rep.tracks[0].track == "eigen");
  CHECK(rep.tracks[0].distances.back() < rep.tracks[0].distances.front());
}

TEST_CASE("Fredholm kernel estimate") {
  const std::vector<std::size_t> ns{8, 16, 32, 64};
  for (std::size_t rank : {0, 1, 2}) {
    const auto rep = fredholm_kernel_estimate(kernel_spec(rank), ns);
    REQUIRE(rep.k.has_value());
    CHECK(*rep.k == rank);
    const RealVector& last = rep.singular_values.back();
    if (rank > 0) CHECK(last[static_cast<Eigen::Index>(rank) - 1] < 1e-6 * last.maxCoeff());
    CHECK(last[static_cast<Eigen::Index>(rank)] > 0.5);
  }

  // σ_min drifts to 0 without reaching the tolerance: no verdict.
  const Symbol degenerate(std::map<int, Complex>{{-1, -1.0}, {0, 2.0}, {1, -1.0}});
  const SequenceSpec drifting = plain(BlaschkeProduct::geometric(0.5), degenerate);
  CHECK_FALSE(fredholm_kernel_estimate(drifting, ns).k.has_value());
}
