#pragma once

#include "ttofs/model_space.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ttofs {

enum class DecayRule { None, Geometric, Harmonic };

/// Gₙ = magnitude(n)·Xₙ/‖Xₙ‖ with Xₙ a seeded random complex matrix;
/// magnitude is scale·rateⁿ (geometric) or scale/n (harmonic).
struct Perturbation {
  DecayRule rule = DecayRule::None;
  double scale = 0.0;
  double rate = 0.5;
  std::uint64_t seed = 0;

  double magnitude(std::size_t n) const;
  Matrix sample(std::size_t n) const;
};

/// c · T_u(s) x y^* in TM coordinates of K_u; the factor T_u(s) is applied
/// only when `left_symbol` is set.
struct CompactTerm {
  Complex coefficient{1.0, 0.0};
  Vector left;
  Vector right;
  std::optional<Symbol> left_symbol;
};

/// Aₙ = P_{uₙ}(T_u(a) + K)P_{uₙ} + Gₙ.
struct SequenceSpec {
  BlaschkeProduct u;
  Symbol symbol;
  std::vector<CompactTerm> compact;
  Perturbation perturbation;
};

Matrix build_section(const SequenceSpec& spec, std::size_t n);

enum class StabilityVerdict { Stable, Unstable, Inconclusive };

std::string to_string(StabilityVerdict v);

struct StabilityReport {
  StabilityVerdict verdict = StabilityVerdict::Inconclusive;
  std::vector<double> sigma_min_trace;
  /// Lower bound on every σ_min from positivity of a real symbol (K = 0).
  std::optional<double> certificate;
  /// The trace respects the certificate and the verdict is "stable".
  bool certificate_consistent = true;
};

StabilityReport stability_probe(const SequenceSpec& spec, const std::vector<std::size_t>& n_list, double threshold);

enum class SpectralMode { SelfAdjointEigen, Singular };

struct SpectralSet {
  enum class Resolution { Exact, Grid };
  std::vector<Complex> points;
  Resolution resolution = Resolution::Exact;
  double grid_step = 0.0;
};

/// Real eigenvalues (ascending) or singular values (ascending). Points that
/// agree to rounding are merged.
SpectralSet spectra(const Matrix& a, SpectralMode mode);

struct GridRect {
  double re_min = -1.0;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;
  std::size_t nx = 101;
  std::size_t ny = 101;

  Complex point(std::size_t i, std::size_t j) const;
  /// Square centred at 0 with half-width `radius`.
  static GridRect square(double radius, std::size_t resolution);
};

struct PseudospectrumSet {
  SpectralSet set;
  /// Some boundary grid point lies in the set.
  bool coverage_warning = false;
  /// Every grid point lies in the set.
  bool full_grid = false;
};

/// σ_min(A − λI) for every grid point, row-major (j·nx + i).
std::vector<double> sigma_min_grid(const Matrix& a, const GridRect& rect, unsigned threads = 1);

/// Grid points λ with σ_min(A − λI) ≤ eps.
PseudospectrumSet pseudospectrum_grid(const Matrix& a, double eps, const GridRect& rect, unsigned threads = 1);

double hausdorff(const SpectralSet& m, const SpectralSet& n);

struct TrackTable {
  std::string track;  // "eigen", "singular" or "pseudospectrum"
  double eps = 0.0;
  std::vector<double> distances;
  /// Nonincreasing within 10% slack.
  bool nonincreasing = false;
};

struct ConvergenceReport {
  std::vector<std::size_t> n_list;
  std::size_t reference_n = 0;
  GridRect rect;
  std::vector<TrackTable> tracks;
  bool eigen_track_skipped = false;
};

/// d_H(set(Aₙ), set(A_ref)) per track. The pseudospectrum rectangle defaults
/// to a square around the ‖A_ref‖ disk with margin 2·max eps.
ConvergenceReport convergence_report(const SequenceSpec& spec, const std::vector<std::size_t>& n_list,
                                     std::size_t reference_n, const std::vector<double>& eps_list,
                                     std::optional<GridRect> rect = std::nullopt, unsigned threads = 1);

bool nonincreasing_within(const std::vector<double>& trace, double slack);

struct FredholmReport {
  /// Detected kernel dimension; nullopt when no stable gap was found.
  std::optional<std::size_t> k;
  double tolerance = 0.0;
  /// Ascending singular values of each section.
  std::vector<RealVector> singular_values;
};

/// Vanish tolerance is `relative_tolerance`·‖A_{n_max}‖.
FredholmReport fredholm_kernel_estimate(const SequenceSpec& spec, const std::vector<std::size_t>& n_list,
                                        double gap_factor = 0.5, double relative_tolerance = 1e-6);

}  // namespace ttofs
