#include "ttofs/fsd.hpp"

#include "ttofs/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace ttofs {

namespace {

constexpr double kSlack = 0.10;

Vector fit(const Vector& v, std::size_t n) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
  const Eigen::Index m = std::min<Eigen::Index>(v.size(), out.size());
  out.head(m) = v.head(m);
  return out;
}

void require_increasing(const std::vector<std::size_t>& n_list, std::size_t min_length) {
  if (n_list.size() < min_length) throw DomainError("n_list needs at least " + std::to_string(min_length) + " entries");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) throw DomainError("n_list must be strictly increasing");
  }
  if (!n_list.empty() && n_list.front() == 0) throw DomainError("n_list entries must be ≥ 1");
}

bool is_normal(const Matrix& a) {
  const double scale = a.squaredNorm();
  return (a * a.adjoint() - a.adjoint() * a).norm() <= 1e-12 * std::max(scale, 1e-300);
}

// 1/‖R^{-1}‖ for upper-triangular R by power iteration on R^{-1}R^{-*}; the
// estimate never undershoots the true σ_min.
double triangular_sigma_min(const Matrix& r) {
  const Eigen::Index n = r.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r(i, i) == Complex(0.0, 0.0)) return 0.0;
  }
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = Complex(1.0 / static_cast<double>(i + 1), 0.5 / static_cast<double>(n - i));
  x.normalize();
  double norm_inv = 0.0;
  for (int it = 0; it < 200; ++it) {
    const Vector y = r.triangularView<Eigen::Upper>().solve(x);
    const double ny = y.norm();
    if (!std::isfinite(ny)) return 0.0;
    const Vector z = r.adjoint().triangularView<Eigen::Lower>().solve(y);
    const double change = std::abs(ny - norm_inv);
    norm_inv = ny;
    const double nz = z.norm();
    if (!std::isfinite(nz) || nz == 0.0) break;
    x = z / nz;
    if (change <= 1e-8 * ny) break;
  }
  return norm_inv > 0.0 ? 1.0 / norm_inv : std::numeric_limits<double>::infinity();
}

struct GridEvaluator {
  bool normal = false;
  Vector eigenvalues;
  Matrix schur;

  explicit GridEvaluator(const Matrix& a) : normal(is_normal(a)) {
    if (normal) {
      Eigen::ComplexEigenSolver<Matrix> es(a, false);
      eigenvalues = es.eigenvalues();
    } else {
      Eigen::ComplexSchur<Matrix> cs(a);
      schur = cs.matrixT();
    }
  }

  double estimate(Complex z) const {
    if (normal) return (eigenvalues.array() - z).abs().minCoeff();
    return triangular_sigma_min(schur - z * Matrix::Identity(schur.rows(), schur.cols()));
  }

  double exact(Complex z) const {
    if (normal) return estimate(z);
    return sigma_min(schur - z * Matrix::Identity(schur.rows(), schur.cols()));
  }
};

template <typename F>
void parallel_rows(std::size_t rows, unsigned threads, F&& body) {
  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(rows)));
  if (threads == 1) {
    for (std::size_t j = 0; j < rows; ++j) body(j);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t j = t; j < rows; j += threads) body(j);
    });
  }
  for (auto& th : pool) th.join();
}

SpectralSet merged(std::vector<Complex> pts, SpectralSet::Resolution res, double step) {
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, std::abs(p));
  SpectralSet out;
  out.resolution = res;
  out.grid_step = step;
  for (const auto& p : pts) {
    if (!out.points.empty() && std::abs(p - out.points.back()) <= 1e-13 * scale) continue;
    out.points.push_back(p);
  }
  return out;
}

}  // namespace

double Perturbation::magnitude(std::size_t n) const {
  switch (rule) {
    case DecayRule::None: return 0.0;
    case DecayRule::Geometric: return scale * std::pow(rate, static_cast<double>(n));
    case DecayRule::Harmonic: return scale / static_cast<double>(n);
  }
  return 0.0;
}

Matrix Perturbation::sample(std::size_t n) const {
  const auto ni = static_cast<Eigen::Index>(n);
  const double mag = magnitude(n);
  if (mag == 0.0) return Matrix::Zero(ni, ni);
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(n) + 1)));
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  Matrix x(ni, ni);
  for (Eigen::Index j = 0; j < ni; ++j)
    for (Eigen::Index k = 0; k < ni; ++k) x(j, k) = Complex(unit(), unit());
  return mag / spectral_norm(x) * x;
}

Matrix build_section(const SequenceSpec& spec, std::size_t n) {
  if (n == 0) throw DomainError("section size must be ≥ 1");
  const CircleGrid& grid = spec.symbol.grid();
  Matrix a = tto_matrix(spec.u, n, spec.symbol, grid).entries;
  for (const auto& term : spec.compact) {
    Vector x = fit(term.left, n);
    if (term.left_symbol) {
      std::size_t m = std::max(n, static_cast<std::size_t>(term.left.size()));
      if (const auto size = spec.u.size()) m = std::min(m, *size);
      const Matrix t = tto_matrix(spec.u, m, *term.left_symbol, term.left_symbol->grid()).entries;
      x = fit(t * fit(term.left, m), n);
    }
    const Vector y = fit(term.right, n);
    a += term.coefficient * x * y.adjoint();
  }
  if (spec.perturbation.rule != DecayRule::None) a += spec.perturbation.sample(n);
  return a;
}

std::string to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Stable: return "stable";
    case StabilityVerdict::Unstable: return "unstable";
    case StabilityVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

StabilityReport stability_probe(const SequenceSpec& spec, const std::vector<std::size_t>& n_list, double threshold) {
  require_increasing(n_list, 3);
  StabilityReport out;
  double last_norm = 0.0;
  for (const auto n : n_list) {
    const Matrix a = build_section(spec, n);
    const RealVector s = singular_values(a);
    out.sigma_min_trace.push_back(s.minCoeff());
    last_norm = s.maxCoeff();
  }
  const auto& t = out.sigma_min_trace;
  const double peak = *std::max_element(t.begin(), t.end());
  const double last = t.back();
  const double prev = t[t.size() - 2];
  const bool above = std::all_of(t.begin(), t.end(), [&](double v) { return v >= threshold; });
  const bool singular = last <= 64.0 * std::numeric_limits<double>::epsilon() * last_norm;
  if (above && last >= 0.5 * peak) {
    out.verdict = StabilityVerdict::Stable;
  } else if (last < threshold && (last <= (1.0 + kSlack) * prev || singular)) {
    out.verdict = StabilityVerdict::Unstable;
  }

  const bool plain = spec.compact.empty() && spec.perturbation.rule == DecayRule::None;
  if (plain && spec.symbol.is_real_valued()) {
    const double c = spec.symbol.real_lower_bound();
    if (c > 0.0) {
      out.certificate = c;
      const bool respected = std::all_of(t.begin(), t.end(), [&](double v) { return v >= c - 1e-10; });
      out.certificate_consistent = respected && (threshold > c || out.verdict == StabilityVerdict::Stable);
    }
  }
  return out;
}

SpectralSet spectra(const Matrix& a, SpectralMode mode) {
  if (a.size() == 0) throw DomainError("spectra of an empty matrix");
  std::vector<Complex> pts;
  if (mode == SpectralMode::SelfAdjointEigen) {
    if (spectral_norm(a - a.adjoint()) >= 1e-10) throw ModeError("eigenvalue mode needs a self-adjoint matrix");
    const Matrix h = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) pts.emplace_back(es.eigenvalues()[i], 0.0);
  } else {
    const RealVector s = singular_values(a);
    for (Eigen::Index i = 0; i < s.size(); ++i) pts.emplace_back(s[i], 0.0);
  }
  return merged(std::move(pts), SpectralSet::Resolution::Exact, 0.0);
}

Complex GridRect::point(std::size_t i, std::size_t j) const {
  const double x = nx > 1 ? re_min + (re_max - re_min) * static_cast<double>(i) / static_cast<double>(nx - 1) : re_min;
  const double y = ny > 1 ? im_min + (im_max - im_min) * static_cast<double>(j) / static_cast<double>(ny - 1) : im_min;
  return {x, y};
}

GridRect GridRect::square(double radius, std::size_t resolution) {
  return {-radius, radius, -radius, radius, resolution, resolution};
}

std::vector<double> sigma_min_grid(const Matrix& a, const GridRect& rect, unsigned threads) {
  const GridEvaluator eval(a);
  std::vector<double> out(rect.nx * rect.ny);
  parallel_rows(rect.ny, threads, [&](std::size_t j) {
    for (std::size_t i = 0; i < rect.nx; ++i) out[j * rect.nx + i] = eval.exact(rect.point(i, j));
  });
  return out;
}

PseudospectrumSet pseudospectrum_grid(const Matrix& a, double eps, const GridRect& rect, unsigned threads) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (rect.nx < 2 || rect.ny < 2 || !(rect.re_max > rect.re_min) || !(rect.im_max > rect.im_min)) {
    throw DomainError("pseudospectrum grid needs a nondegenerate rectangle");
  }
  const GridEvaluator eval(a);
  std::vector<char> inside(rect.nx * rect.ny, 0);
  parallel_rows(rect.ny, threads, [&](std::size_t j) {
    for (std::size_t i = 0; i < rect.nx; ++i) {
      const Complex z = rect.point(i, j);
      double s = eval.estimate(z);
      // Estimates are upper bounds; confirm the ambiguous band exactly.
      if (s > eps && s <= 1.5 * eps) s = eval.exact(z);
      inside[j * rect.nx + i] = s <= eps ? 1 : 0;
    }
  });

  PseudospectrumSet out;
  std::vector<Complex> pts;
  bool all = true;
  for (std::size_t j = 0; j < rect.ny; ++j) {
    for (std::size_t i = 0; i < rect.nx; ++i) {
      if (!inside[j * rect.nx + i]) {
        all = false;
        continue;
      }
      pts.push_back(rect.point(i, j));
      if (i == 0 || j == 0 || i + 1 == rect.nx || j + 1 == rect.ny) out.coverage_warning = true;
    }
  }
  out.full_grid = all;
  out.set.points = std::move(pts);
  out.set.resolution = SpectralSet::Resolution::Grid;
  out.set.grid_step = std::max((rect.re_max - rect.re_min) / static_cast<double>(rect.nx - 1),
                               (rect.im_max - rect.im_min) / static_cast<double>(rect.ny - 1));
  return out;
}

double hausdorff(const SpectralSet& m, const SpectralSet& n) {
  if (m.points.empty() || n.points.empty()) throw DomainError("Hausdorff distance needs nonempty sets");
  auto directed = [](const std::vector<Complex>& from, const std::vector<Complex>& to) {
    double sup = 0.0;
    for (const auto& p : from) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to) best = std::min(best, std::abs(p - q));
      sup = std::max(sup, best);
    }
    return sup;
  };
  return std::max(directed(m.points, n.points), directed(n.points, m.points));
}

bool nonincreasing_within(const std::vector<double>& trace, double slack) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] > (1.0 + slack) * trace[i - 1] + 1e-14) return false;
  }
  return true;
}

ConvergenceReport convergence_report(const SequenceSpec& spec, const std::vector<std::size_t>& n_list,
                                     std::size_t reference_n, const std::vector<double>& eps_list,
                                     std::optional<GridRect> rect, unsigned threads) {
  require_increasing(n_list, 1);
  ConvergenceReport out;
  out.n_list = n_list;
  out.reference_n = reference_n;
  const Matrix ref = build_section(spec, reference_n);
  std::vector<Matrix> sections;
  for (const auto n : n_list) sections.push_back(build_section(spec, n));

  const double ref_norm = spectral_norm(ref);
  const double eps_max = eps_list.empty() ? 0.0 : *std::max_element(eps_list.begin(), eps_list.end());
  out.rect = rect.value_or(GridRect::square(ref_norm + 2.0 * eps_max, 161));

  bool self_adjoint = spectral_norm(ref - ref.adjoint()) < 1e-10;
  for (const auto& s : sections) self_adjoint = self_adjoint && spectral_norm(s - s.adjoint()) < 1e-10;
  out.eigen_track_skipped = !self_adjoint;

  auto track = [&](const std::string& name, double eps, auto&& to_set) {
    TrackTable t;
    t.track = name;
    t.eps = eps;
    const SpectralSet r = to_set(ref);
    for (const auto& s : sections) t.distances.push_back(hausdorff(to_set(s), r));
    t.nonincreasing = nonincreasing_within(t.distances, kSlack);
    out.tracks.push_back(std::move(t));
  };
  if (self_adjoint) track("eigen", 0.0, [](const Matrix& m) { return spectra(m, SpectralMode::SelfAdjointEigen); });
  track("singular", 0.0, [](const Matrix& m) { return spectra(m, SpectralMode::Singular); });
  for (const double eps : eps_list) {
    track("pseudospectrum", eps, [&](const Matrix& m) {
      const auto ps = pseudospectrum_grid(m, eps, out.rect, threads);
      if (ps.set.points.empty()) throw ResolutionError("pseudospectral grid misses the eps-pseudospectrum");
      return ps.set;
    });
  }
  return out;
}

FredholmReport fredholm_kernel_estimate(const SequenceSpec& spec, const std::vector<std::size_t>& n_list,
                                        double gap_factor, double relative_tolerance) {
  require_increasing(n_list, 2);
  FredholmReport out;
  for (const auto n : n_list) out.singular_values.push_back(singular_values(build_section(spec, n)));
  const RealVector& last = out.singular_values.back();
  out.tolerance = relative_tolerance * last.maxCoeff();

  std::size_t k = 0;
  while (static_cast<Eigen::Index>(k) < last.size() && last[static_cast<Eigen::Index>(k)] < out.tolerance) ++k;
  if (static_cast<Eigen::Index>(k) == last.size()) return out;

  // σ_k vanishes on the tail (last two sections) and σ_{k+1} keeps a gap.
  const std::size_t m = out.singular_values.size();
  for (std::size_t i = m - 2; i < m && k > 0; ++i) {
    const RealVector& s = out.singular_values[i];
    if (static_cast<Eigen::Index>(k) > s.size() || s[static_cast<Eigen::Index>(k) - 1] >= out.tolerance) return out;
  }
  double running = 0.0;
  for (const auto& s : out.singular_values) {
    if (static_cast<Eigen::Index>(k) >= s.size()) continue;
    const double next = s[static_cast<Eigen::Index>(k)];
    running = std::max(running, next);
    if (next < gap_factor * running) return out;
  }
  out.k = k;
  return out;
}

}  // namespace ttofs
