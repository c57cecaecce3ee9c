#include "ttofs/model_space.hpp"

#include "ttofs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ttofs {

namespace {

constexpr std::size_t kMaxWindow = std::size_t{1} << 14;
constexpr std::size_t kMaxQuadratureGrid = std::size_t{1} << 17;
constexpr double kBasisTolerance = 1e-10;

double max_modulus(std::span<const Zero> zeros) {
  double m = 0.0;
  for (const auto& z : zeros) m = std::max(m, z.modulus());
  return m;
}

// conj(γ) with γ = −|λ|/λ, so that (z − λ) e_k = √(1−|λ|²) conj(γ) Π_{j≤k} b_j.
Complex conj_gamma(const Zero& z) { return z.is_origin() ? Complex(1.0, 0.0) : -z.phase(); }

// A ← L·A for lower-triangular L, summing over i = k..j in a fixed order so
// the result on a leading block never depends on the matrix size.
Matrix lower_product(const Matrix& l, const Matrix& a) {
  const Eigen::Index n = l.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = k; j < n; ++j) {
      Complex s(0.0, 0.0);
      for (Eigen::Index i = k; i <= j; ++i) s += l(j, i) * a(i, k);
      out(j, k) = s;
    }
  }
  return out;
}

// (S^*)^p by binary powering; column norms are the Fourier tails beyond p.
Matrix adjoint_power(const Matrix& s, std::size_t p) {
  Matrix result = Matrix::Identity(s.rows(), s.cols());
  Matrix base = s.adjoint();
  while (p > 0) {
    if (p & 1U) result = base * result;
    p >>= 1U;
    if (p > 0) base = base * base;
  }
  return result;
}

double quadrature_gram_residual(const Matrix& samples) {
  const double m = static_cast<double>(samples.rows());
  const Matrix g = samples.adjoint() * samples / m - Matrix::Identity(samples.cols(), samples.cols());
  return hermitian_norm(g);
}

// (T(a) x)[j] = Σ_k â(j−k) x_k on the first x.size() modes.
Matrix toeplitz_apply(const Symbol& a, const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix y = Matrix::Zero(n, x.cols());
  const int w = a.window();
  for (int d = -w; d <= w; ++d) {
    const Complex c = a.coeff(d);
    if (c == Complex(0.0, 0.0)) continue;
    const Eigen::Index lo = std::max<Eigen::Index>(0, d);
    const Eigen::Index hi = std::min<Eigen::Index>(n, n + d);
    if (lo >= hi) continue;
    y.middleRows(lo, hi - lo) += c * x.middleRows(lo - d, hi - lo);
  }
  return y;
}

Matrix quadrature_route(std::span<const Zero> zeros, const Symbol& a, const CircleGrid& grid) {
  std::size_t m = std::max(grid.size(), CircleGrid::for_window(static_cast<std::size_t>(std::max(a.window(), 1))).size());
  while (true) {
    const CircleGrid g(m);
    const Matrix e = tm_samples(zeros, g);
    if (quadrature_gram_residual(e) < kBasisTolerance) {
      const Vector av = a.evaluate(g);
      const Eigen::Index n = e.cols();
      Matrix out(n, n);
      const double w = g.weight();
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
          Complex s(0.0, 0.0);
          for (Eigen::Index i = 0; i < e.rows(); ++i) s += std::conj(e(i, j)) * av[i] * e(i, k);
          out(j, k) = s * w;
        }
      }
      return out;
    }
    if (2 * m > kMaxQuadratureGrid) {
      std::ostringstream msg;
      msg << "quadrature grid cannot resolve the TM basis by M = " << kMaxQuadratureGrid
          << " (max |lambda| = " << max_modulus(zeros) << ")";
      throw ResolutionError(msg.str());
    }
    m *= 2;
  }
}

}  // namespace

std::string TMBasis::id() const {
  std::ostringstream s;
  s << "tm:n=" << zeros.size() << ":N_F=" << window() << ":M=" << grid.size();
  return s.str();
}

Matrix tm_embedding(std::span<const Zero> zeros, std::size_t length) {
  const auto len = static_cast<Eigen::Index>(length);
  Matrix e(len, static_cast<Eigen::Index>(zeros.size()));
  Vector running = Vector::Zero(len);
  if (len > 0) running[0] = 1.0;
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    Vector col = running;
    series::divide_by_kernel(col, zeros[k]);
    e.col(static_cast<Eigen::Index>(k)) = std::sqrt(zeros[k].defect()) * col;
    series::multiply_by_factor(running, zeros[k]);
  }
  return e;
}

Vector tm_values(std::span<const Zero> zeros, Complex z) {
  Vector v(static_cast<Eigen::Index>(zeros.size()));
  Complex running(1.0, 0.0);
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = std::sqrt(zeros[k].defect()) / kernel_denominator(zeros[k], z) * running;
    running *= factor_eval(zeros[k], z);
  }
  return v;
}

Matrix tm_samples(std::span<const Zero> zeros, const CircleGrid& grid) {
  Matrix s(static_cast<Eigen::Index>(grid.size()), static_cast<Eigen::Index>(zeros.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) s.row(static_cast<Eigen::Index>(i)) = tm_values(zeros, grid.point(i)).transpose();
  return s;
}

RealVector tm_column_tails(std::span<const Zero> zeros, std::size_t window) {
  const Matrix tails = adjoint_power(truncated_shift(zeros), window);
  RealVector out(tails.cols());
  for (Eigen::Index k = 0; k < tails.cols(); ++k) out[k] = tails.col(k).norm();
  return out;
}

TMBasis tm_basis(const BlaschkeProduct& u, std::size_t n, std::size_t window, const CircleGrid& grid) {
  if (n == 0) throw DomainError("TM basis needs n ≥ 1");
  if (window == 0) throw DomainError("TM basis needs N_F ≥ 1");
  TMBasis basis;
  basis.zeros = u.zeros(n);
  std::size_t w = window;
  std::size_t m = grid.size();
  while (true) {
    const RealVector tail_norms = tm_column_tails(basis.zeros, w);
    const bool window_ok = tail_norms.maxCoeff() < kBasisTolerance;
    if (window_ok) {
      basis.embedding = tm_embedding(basis.zeros, w);
      basis.column_tails = tail_norms;
      const Matrix gram = basis.embedding.adjoint() * basis.embedding - Matrix::Identity(tail_norms.size(), tail_norms.size());
      basis.grid = CircleGrid(m);
      basis.samples = tm_samples(basis.zeros, basis.grid);
      const double quad = quadrature_gram_residual(basis.samples);
      basis.gram_residual = std::max(hermitian_norm(gram), quad);
      if (basis.gram_residual < kBasisTolerance) return basis;
      if (2 * m > kMaxQuadratureGrid) break;
      m *= 2;
      continue;
    }
    if (2 * w > kMaxWindow) break;
    w *= 2;
    m = std::max(m, 2 * w);
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "TM basis of order " << n << " not resolved by N_F = " << kMaxWindow << " (max |lambda| = "
      << max_modulus(basis.zeros) << ")";
  throw ResolutionError(msg.str());
}

Matrix truncated_shift(std::span<const Zero> zeros) {
  const auto n = static_cast<Eigen::Index>(zeros.size());
  Matrix s = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Zero& zk = zeros[static_cast<std::size_t>(k)];
    s(k, k) = zk.value;
    Complex running = std::sqrt(zk.defect()) * conj_gamma(zk);
    for (Eigen::Index j = k + 1; j < n; ++j) {
      const Zero& zj = zeros[static_cast<std::size_t>(j)];
      s(j, k) = running * std::sqrt(zj.defect());
      running *= zj.modulus();
    }
  }
  return s;
}

Vector backward_shift_coordinates(std::span<const Zero> zeros) {
  const auto n = static_cast<Eigen::Index>(zeros.size());
  Vector w(n);
  double tail = 1.0;
  for (Eigen::Index l = n - 1; l >= 0; --l) {
    const Zero& z = zeros[static_cast<std::size_t>(l)];
    w[l] = std::sqrt(z.defect()) * std::conj(conj_gamma(z)) * tail;
    tail *= z.modulus();
  }
  return w;
}

Matrix hankel_coordinates(std::span<const Zero> zeros, std::size_t cols) {
  const Matrix s_adj = truncated_shift(zeros).adjoint();
  Matrix out(static_cast<Eigen::Index>(zeros.size()), static_cast<Eigen::Index>(cols));
  Vector v = backward_shift_coordinates(zeros);
  for (Eigen::Index m = 0; m < out.cols(); ++m) {
    out.col(m) = v;
    v = s_adj * v;
  }
  return out;
}

Vector fourier_to_model(std::span<const Zero> zeros, const Vector& x) {
  return tm_embedding(zeros, static_cast<std::size_t>(x.size())).adjoint() * x;
}

OperatorMatrix projection_matrix(const TMBasis& basis) {
  OperatorMatrix out;
  out.entries = basis.embedding * basis.embedding.adjoint();
  out.rows = out.cols = {BasisTag::Kind::Fourier, basis.window(), "fourier"};
  out.tail_warning = basis.column_tails.size() > 0 && basis.column_tails.maxCoeff() >= kBasisTolerance;
  return out;
}

OperatorMatrix projection_matrix_multiplicative(const BlaschkeProduct& u, std::size_t n, std::size_t window) {
  const auto zs = u.zeros(n);
  const Vector c = taylor_coefficients(zs, window);
  const auto w = static_cast<Eigen::Index>(window);
  Matrix t = Matrix::Zero(w, w);
  for (Eigen::Index j = 0; j < w; ++j)
    for (Eigen::Index k = 0; k <= j; ++k) t(j, k) = c[j - k];
  OperatorMatrix out;
  out.entries = Matrix::Identity(w, w) - t * t.adjoint();
  out.rows = out.cols = {BasisTag::Kind::Fourier, window, "fourier"};
  return out;
}

Symbol blaschke_symbol(std::span<const Zero> zeros, std::size_t window) {
  const auto w = static_cast<Eigen::Index>(window);
  const Vector taylor = taylor_coefficients(zeros, 4 * window + 4);
  Vector coeffs = Vector::Zero(2 * w + 1);
  coeffs.tail(w + 1) = taylor.head(w + 1);
  const double tail = taylor.tail(taylor.size() - (w + 1)).cwiseAbs().sum();
  std::vector<Zero> copy(zeros.begin(), zeros.end());
  Symbol::Function src = [copy](Complex z) { return partial_product_eval(std::span<const Zero>(copy), z); };
  const CircleGrid grid = CircleGrid::for_window(std::max<std::size_t>(window, 1));
  Vector samples(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) samples[static_cast<Eigen::Index>(i)] = src(grid.point(i));
  Symbol out(std::move(coeffs), grid, std::move(samples), tail, tail > 0.0 ? src : nullptr);
  out.set_tag("u_" + std::to_string(zeros.size()));
  return out;
}

std::string to_string(TTORoute route) {
  switch (route) {
    case TTORoute::Auto: return "auto";
    case TTORoute::ShiftAlgebra: return "shift-algebra";
    case TTORoute::Quadrature: return "quadrature";
    case TTORoute::FourierEmbedding: return "fourier-embedding";
  }
  return "unknown";
}

Matrix tto_shift_algebra(std::span<const Zero> zeros, const Symbol& a) {
  const auto n = static_cast<Eigen::Index>(zeros.size());
  const Matrix s = truncated_shift(zeros);
  const int pos = std::max(a.positive_degree(), 0);
  const int neg = a.negative_degree();
  const int top = std::max(pos, neg);

  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) out(k, k) = a.coeff(0);
  Matrix power = Matrix::Identity(n, n);
  for (int p = 1; p <= top; ++p) {
    power = lower_product(s, power);
    const Complex ap = a.coeff(p);
    const Complex am = a.coeff(-p);
    for (Eigen::Index k = 0; k < n; ++k) {
      for (Eigen::Index j = k; j < n; ++j) {
        if (ap != Complex(0.0, 0.0)) out(j, k) += ap * power(j, k);
        if (am != Complex(0.0, 0.0)) out(k, j) += am * std::conj(power(j, k));
      }
    }
  }
  return out;
}

TTOMatrix tto_matrix(const BlaschkeProduct& u, std::size_t n, const Symbol& a, const CircleGrid& grid, TTORoute route) {
  if (n == 0) throw DomainError("tto_matrix needs n ≥ 1");
  const auto zs = u.zeros(n);
  if (route == TTORoute::Auto) {
    const bool polynomial = a.tail_bound() <= 1e-12 * std::max(1.0, a.l1_norm());
    route = polynomial ? TTORoute::ShiftAlgebra : TTORoute::Quadrature;
  }
  TTOMatrix out;
  out.symbol_tag = a.tag();
  out.route = route;
  switch (route) {
    case TTORoute::ShiftAlgebra:
      out.entries = tto_shift_algebra(zs, a);
      out.basis_id = "tm:n=" + std::to_string(n) + ":closed-form";
      break;
    case TTORoute::Quadrature:
      out.entries = quadrature_route(zs, a, grid);
      out.basis_id = "tm:n=" + std::to_string(n) + ":quadrature";
      break;
    case TTORoute::FourierEmbedding: {
      const std::size_t window = std::max<std::size_t>(64, grid.size() / 8);
      const TMBasis basis = tm_basis(u, n, window, grid);
      out.entries = basis.embedding.adjoint() * toeplitz_apply(a, basis.embedding);
      out.basis_id = basis.id();
      break;
    }
    case TTORoute::Auto: break;
  }
  return out;
}

OperatorMatrix r_matrix(const BlaschkeProduct& u, std::size_t n, std::size_t window) {
  if (window == 0) throw DomainError("r_matrix needs N_F ≥ 1");
  const auto zs = u.zeros(n);
  const auto w = static_cast<Eigen::Index>(window);
  const Vector c = taylor_coefficients(zs, 4 * window);
  OperatorMatrix out;
  out.entries.resize(w, w);
  for (Eigen::Index j = 0; j < w; ++j)
    for (Eigen::Index k = 0; k < w; ++k) out.entries(j, k) = c[j + k + 1];
  out.rows = out.cols = {BasisTag::Kind::Fourier, window, "fourier"};
  out.tail_warning = c.tail(2 * w).norm() > 1e-12;
  return out;
}

IsometryResiduals hankel_isometry_check(const Symbol& v, std::size_t window) {
  if (window == 0) throw DomainError("isometry check needs N_F ≥ 1");
  const Vector& samples = v.samples();
  const double unimodular_error = (samples.cwiseAbs().array() - 1.0).abs().maxCoeff();
  if (unimodular_error > 1e-10) throw DomainError("symbol is not unimodular on the circle");
  for (int j = 1; j <= v.window(); ++j) {
    if (std::abs(v.coeff(-j)) > 1e-12) throw DomainError("symbol is not analytic (negative Fourier modes)");
  }
  const auto w = static_cast<Eigen::Index>(window);
  const Matrix h = hankel_block(v, window, window);
  Matrix t = Matrix::Zero(w, w);
  for (Eigen::Index j = 0; j < w; ++j)
    for (Eigen::Index k = 0; k <= j; ++k) t(j, k) = v.coeff(static_cast<long>(j - k));
  // HH^* + TT^* − I, lower triangle only; T(v̄) = T(v)^*.
  Matrix r = -Matrix::Identity(w, w);
  r.selfadjointView<Eigen::Lower>().rankUpdate(h);
  r.selfadjointView<Eigen::Lower>().rankUpdate(t);
  IsometryResiduals out;
  out.range = hermitian_norm(r);
  // H is symmetric and T(conj ṽ) is the entrywise conjugate of T(v), so
  // H^*H + T̄T̄^* − I is the conjugate of the range residual: same spectrum.
  out.initial = out.range;
  out.tail_warning = !v.is_trig_polynomial() && 2 * static_cast<long>(window) - 1 > v.window();
  return out;
}

std::size_t reference_order(const BlaschkeProduct& u, std::size_t n_max) {
  if (const auto size = u.size()) return *size;
  return std::max<std::size_t>(4 * n_max, 64);
}

std::vector<double> r_convergence_probe(const BlaschkeProduct& u, const Vector& x, const std::vector<std::size_t>& n_list,
                                        std::size_t window, ProbeMode mode, Representation rep) {
  if (n_list.empty()) return {};
  if (static_cast<std::size_t>(x.size()) > window) throw DomainError("probe vector longer than the window");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  const std::size_t big = reference_order(u, n_max);
  if (n_max > big) throw DomainError("n exceeds the number of zeros");
  const BlaschkeProduct source = mode == ProbeMode::Forward ? u : reflect(u);
  const auto zs = source.zeros(big);
  const auto w = static_cast<Eigen::Index>(window);
  Vector xw = Vector::Zero(w);
  xw.head(x.size()) = x;

  std::vector<double> out;
  out.reserve(n_list.size());
  if (mode == ProbeMode::ReflectedProjection) {
    // P_{v_n} uses the leading columns of the reference embedding.
    const Matrix e = tm_embedding(zs, rep == Representation::FourierWindow ? window : static_cast<std::size_t>(x.size()));
    const Vector coords = e.adjoint() * (rep == Representation::FourierWindow ? xw : x);
    for (const auto n : n_list) {
      const auto ni = static_cast<Eigen::Index>(n);
      if (rep == Representation::ModelCoordinates) {
        out.push_back(coords.tail(coords.size() - ni).norm());
      } else {
        out.push_back((e.rightCols(e.cols() - ni) * coords.tail(coords.size() - ni)).norm());
      }
    }
    return out;
  }

  if (rep == Representation::ModelCoordinates) {
    const Vector ref = hankel_coordinates(zs, static_cast<std::size_t>(x.size())) * x;
    for (const auto n : n_list) {
      const std::span<const Zero> head(zs.data(), n);
      Vector diff = ref;
      diff.head(static_cast<Eigen::Index>(n)) -= hankel_coordinates(head, static_cast<std::size_t>(x.size())) * x;
      out.push_back(diff.norm());
    }
    return out;
  }

  // Adjoint mode: H(u)^* = H(v) for the reflected product v.
  const Vector ref = taylor_coefficients(zs, 2 * window + 1);
  for (const auto n : n_list) {
    const Vector d = taylor_coefficients(std::span<const Zero>(zs.data(), n), 2 * window + 1) - ref;
    Vector y = Vector::Zero(w);
    for (Eigen::Index j = 0; j < w; ++j) {
      Complex s(0.0, 0.0);
      for (Eigen::Index k = 0; k < x.size(); ++k) s += d[j + k + 1] * x[k];
      y[j] = s;
    }
    out.push_back(y.norm());
  }
  return out;
}

}  // namespace ttofs
