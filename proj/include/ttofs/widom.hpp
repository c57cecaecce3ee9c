#pragma once

#include "ttofs/model_space.hpp"

#include <cstddef>
#include <vector>

namespace ttofs {

struct WidomReport {
  double residual_spectral = 0.0;
  double residual_frobenius = 0.0;
  std::size_t n = 0;
  std::size_t window = 0;
  std::size_t grid_size = 0;
  bool truncation_flag = false;
};

/// Residual of P T(ab) P − [P T(a) P T(b) P + P H(a)H(b̃) P + R H(ã)H(b) R^*]
/// with P = P_{u_n} and R = R_{u_n}, compressed to the first N_F modes.
///
/// Every term is assembled in factored form (TM embedding, Hankel columns of
/// u_n) so the norm comes from a small QR-reduced core instead of an
/// N_F × N_F SVD.
WidomReport tto_widom_residual(const BlaschkeProduct& u, const Symbol& a, const Symbol& b, std::size_t n,
                               std::size_t window);

struct CompactCorrection {
  OperatorMatrix k;
  /// Order of the partial product standing in for u.
  std::size_t order = 0;
};

/// K = H(a)H(b̃) + H(u)H(ã)H(b)H(u)^* on the window.
CompactCorrection compact_correction(const BlaschkeProduct& u, const Symbol& a, const Symbol& b, std::size_t window,
                                     std::size_t order);

/// ‖P T(a) P T(b) P − P T(ab) P + P K P‖ on K_{u_n} for each n, in TM
/// coordinates.
std::vector<double> correction_defect(const BlaschkeProduct& u, const Symbol& a, const Symbol& b,
                                      const std::vector<std::size_t>& n_list);

/// c · x y^* with x, y given by Fourier coefficients.
struct RankOneTerm {
  Complex coefficient{1.0, 0.0};
  Vector left;
  Vector right;
};

struct FiniteRankOperator {
  std::vector<RankOneTerm> terms;
  std::size_t support() const;
};

/// ‖R_{u_n} L R_{u_n}^* − P_{u_n} H(u) L H(u)^* P_{u_n}‖ for each n.
std::vector<double> corollary_convergence_residual(const BlaschkeProduct& u, const FiniteRankOperator& l,
                                                   const std::vector<std::size_t>& n_list, std::size_t window,
                                                   Representation rep = Representation::ModelCoordinates);

}  // namespace ttofs
