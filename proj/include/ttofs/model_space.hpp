#pragma once

#include "ttofs/blaschke.hpp"
#include "ttofs/hardy.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ttofs {

/// Takenaka–Malmquist basis e_1..e_n of K_{u_n}, held as exact Taylor
/// coefficients on the window [0, N_F) and as samples on a circle grid.
struct TMBasis {
  std::vector<Zero> zeros;
  Matrix embedding;  // N_F × n
  CircleGrid grid{16};
  Matrix samples;  // M × n
  /// max(‖E^*E − I‖, ‖(1/M) S^*S − I‖)
  double gram_residual = 0.0;
  /// ℓ² mass of each column beyond the window.
  RealVector column_tails;

  std::size_t size() const { return zeros.size(); }
  std::size_t window() const { return static_cast<std::size_t>(embedding.rows()); }
  std::string id() const;
};

/// Exact Taylor coefficients of e_1..e_n, truncated to `length` rows.
Matrix tm_embedding(std::span<const Zero> zeros, std::size_t length);
/// e_k(z) for k = 1..n.
Vector tm_values(std::span<const Zero> zeros, Complex z);
Matrix tm_samples(std::span<const Zero> zeros, const CircleGrid& grid);
/// ℓ² norm of the Fourier coefficients of e_k at indices ≥ window, from the
/// closed form ‖(S^*)^window e_k‖.
RealVector tm_column_tails(std::span<const Zero> zeros, std::size_t window);

/// Builds the basis and doubles window and grid until every column tail and
/// the Gram residual fall below 1e−10. Gives up with ResolutionError past
/// N_F = 2^14.
TMBasis tm_basis(const BlaschkeProduct& u, std::size_t n, std::size_t window, const CircleGrid& grid);

/// Matrix of S_{u_n} = P_{u_n} S|K_{u_n} in TM coordinates (closed form,
/// lower triangular, exact for any zero deficits).
Matrix truncated_shift(std::span<const Zero> zeros);

/// TM coordinates of S^* u_n.
Vector backward_shift_coordinates(std::span<const Zero> zeros);
/// Column m holds the TM coordinates of H(u_n) z^m = (S^*)^{m+1} u_n.
Matrix hankel_coordinates(std::span<const Zero> zeros, std::size_t cols);
/// TM coordinates of P_{u_n} x for x given by its first Fourier coefficients.
Vector fourier_to_model(std::span<const Zero> zeros, const Vector& x);

/// P_{u_n} compressed to the window: E E^*.
OperatorMatrix projection_matrix(const TMBasis& basis);
/// Independent route I − T(u_n) T(ū_n) on the window.
OperatorMatrix projection_matrix_multiplicative(const BlaschkeProduct& u, std::size_t n, std::size_t window);

/// Coefficients of u_n as a symbol on −window..window, with samples on the
/// default grid and the exact product as evaluation source.
Symbol blaschke_symbol(std::span<const Zero> zeros, std::size_t window);

enum class TTORoute { Auto, ShiftAlgebra, Quadrature, FourierEmbedding };

std::string to_string(TTORoute route);

struct TTOMatrix {
  Matrix entries;
  std::string symbol_tag;
  std::string basis_id;
  TTORoute route = TTORoute::Auto;
};

/// Σ_{p≥0} â(p) S^p + Σ_{p>0} â(−p) (S^*)^p in TM coordinates. Nested sizes
/// give bitwise identical leading blocks.
Matrix tto_shift_algebra(std::span<const Zero> zeros, const Symbol& a);

/// Matrix of T_{u_n}(a) in the TM basis. Auto picks the shift algebra for
/// trigonometric polynomials and quadrature otherwise.
TTOMatrix tto_matrix(const BlaschkeProduct& u, std::size_t n, const Symbol& a, const CircleGrid& grid,
                     TTORoute route = TTORoute::Auto);

/// Hankel matrix of u_n on the window; equals R_{u_n} = H(u_n).
OperatorMatrix r_matrix(const BlaschkeProduct& u, std::size_t n, std::size_t window);

struct IsometryResiduals {
  /// ‖H(v)H(v)^* − (P − vPv̄)‖ on the window.
  double range = 0.0;
  /// ‖H(v)^*H(v) − (P − ṽ̄Pṽ)‖ on the window.
  double initial = 0.0;
  bool tail_warning = false;
};

/// Checks that H(v) is a partial isometry; v must be unimodular and analytic.
IsometryResiduals hankel_isometry_check(const Symbol& v, std::size_t window);

enum class ProbeMode { Forward, Adjoint, ReflectedProjection };
enum class Representation { FourierWindow, ModelCoordinates };

/// Reference order standing in for n = ∞: the product size when finite,
/// otherwise max(4·n_max, 64).
std::size_t reference_order(const BlaschkeProduct& u, std::size_t n_max);

/// ‖(R_{u_n} − R_u) x‖ (Forward), ‖(R_{u_n}^* − R_u^*) x‖ (Adjoint) or
/// ‖(P_{v_n} − P_v) x‖ with v the reflected product, for each n.
std::vector<double> r_convergence_probe(const BlaschkeProduct& u, const Vector& x,
                                        const std::vector<std::size_t>& n_list, std::size_t window,
                                        ProbeMode mode = ProbeMode::Forward,
                                        Representation rep = Representation::FourierWindow);

}  // namespace ttofs
