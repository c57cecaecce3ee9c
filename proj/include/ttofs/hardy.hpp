#pragma once

#include "ttofs/core.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <string>

namespace ttofs {

/// M uniform points t_m = e^{2πim/M} with weights 1/M (normalized measure).
class CircleGrid {
 public:
  explicit CircleGrid(std::size_t m);

  /// Default grid for a coefficient window: 8·N_F rounded up to a power of two.
  static CircleGrid for_window(std::size_t window);

  std::size_t size() const { return m_; }
  double weight() const { return 1.0 / static_cast<double>(m_); }
  double angle(std::size_t i) const { return kTwoPi * static_cast<double>(i) / static_cast<double>(m_); }
  Complex point(std::size_t i) const { return std::polar(1.0, angle(i)); }
  Vector points() const;

  /// (1/M) Σ_m t_m^j, exactly δ_{j,0} for |j| < M.
  Complex quadrature_of_power(long j) const;

 private:
  std::size_t m_;
};

/// A function on the circle held as grid samples plus the Fourier
/// coefficients â(j), |j| ≤ window.
class Symbol {
 public:
  using Function = std::function<Complex(Complex)>;

  Symbol() : Symbol(std::map<int, Complex>{{0, Complex(0.0, 0.0)}}) {}
  /// Exact trigonometric polynomial.
  explicit Symbol(const std::map<int, Complex>& coefficients);

  static Symbol constant(Complex c) { return Symbol(std::map<int, Complex>{{0, c}}); }
  static Symbol monomial(int p) { return Symbol(std::map<int, Complex>{{p, Complex(1.0, 0.0)}}); }

  /// Raw constructor used by analyze(); coefficients indexed −window..window.
  Symbol(Vector coefficients, CircleGrid grid, Vector samples, double tail_bound, Function source);

  int window() const { return window_; }
  Complex coeff(long j) const;
  const Vector& coefficients() const { return coeffs_; }
  const CircleGrid& grid() const { return grid_; }
  const Vector& samples() const { return samples_; }
  double tail_bound() const { return tail_bound_; }
  bool is_trig_polynomial() const { return tail_bound_ == 0.0; }

  /// Largest j ≥ 0 with â(j) ≠ 0 (−1 if none); likewise for −j.
  int positive_degree() const;
  int negative_degree() const;
  double l1_norm() const;

  Complex operator()(Complex t) const;
  Vector evaluate(const CircleGrid& grid) const;

  bool is_real_valued(double tol = 1e-12) const;
  /// Guaranteed lower bound of Re a on the circle (grid minimum minus a
  /// Lipschitz correction from Σ|j||â(j)|).
  double real_lower_bound(std::size_t grid_size = 8192) const;

  std::string tag() const { return tag_; }
  void set_tag(std::string tag) { tag_ = std::move(tag); }

 private:
  int window_ = 0;
  Vector coeffs_;
  CircleGrid grid_{16};
  Vector samples_;
  double tail_bound_ = 0.0;
  Function source_;
  std::string tag_ = "symbol";
};

/// Discrete Fourier analysis on a fixed grid; throws DomainError (aliasing)
/// unless window < M/2.
Symbol analyze(const Symbol::Function& f, const CircleGrid& grid, int window);
Symbol analyze(const Vector& samples, const CircleGrid& grid, int window);
/// Grid doubled from 8·window until the window coefficients change by < 1e−12.
Symbol analyze(const Symbol::Function& f, int window);

/// ã(t) = a(1/t).
Symbol flip(const Symbol& a);
/// Pointwise complex conjugate.
Symbol conjugate(const Symbol& a);
Symbol multiply(const Symbol& a, const Symbol& b);

struct BasisTag {
  enum class Kind { Fourier, TakenakaMalmquist };
  Kind kind = Kind::Fourier;
  std::size_t size = 0;
  std::string id = "fourier";
};

/// Dense matrix of an operator compressed to a finite basis.
struct OperatorMatrix {
  Matrix entries;
  BasisTag rows;
  BasisTag cols;
  /// The symbol window did not cover every index the matrix needed.
  bool tail_warning = false;

  OperatorMatrix adjoint() const { return {entries.adjoint(), cols, rows, tail_warning}; }
};

/// [â(j−k)]_{j,k<n}.
OperatorMatrix toeplitz_matrix(const Symbol& a, std::size_t n);
/// [â(j+k+1)]_{j,k<n}.
OperatorMatrix hankel_matrix(const Symbol& a, std::size_t n);
/// Rectangular Hankel block [â(j+k+1)], j < rows, k < cols.
Matrix hankel_block(const Symbol& a, std::size_t rows, std::size_t cols);

struct Residual {
  double spectral = 0.0;
  double frobenius = 0.0;
  bool truncation_flag = false;
};

/// Norm of PₙT(ab)Pₙ − [PₙT(a)PₙT(b)Pₙ + PₙH(a)H(b̃)Pₙ + RₙH(ã)H(b)Rₙ] on
/// the first N Fourier modes.
Residual classical_widom_residual(const Symbol& a, const Symbol& b, std::size_t n, std::size_t window);

}  // namespace ttofs
