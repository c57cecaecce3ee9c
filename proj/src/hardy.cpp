#include "ttofs/hardy.hpp"

#include "ttofs/linalg.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <vector>

namespace ttofs {

namespace {

constexpr std::size_t kMaxAnalysisGrid = std::size_t{1} << 20;

Vector fft_coefficients(const Vector& samples) {
  const auto m = static_cast<std::size_t>(samples.size());
  std::vector<Complex> in(samples.data(), samples.data() + m);
  std::vector<Complex> out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  Vector c(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) c[static_cast<Eigen::Index>(i)] = out[i] / static_cast<double>(m);
  return c;
}

Symbol symbol_from_samples(const Vector& samples, const CircleGrid& grid, int window, Symbol::Function source) {
  const auto m = grid.size();
  if (window < 0 || static_cast<std::size_t>(2 * window) >= m) {
    throw DomainError("aliasing: window " + std::to_string(window) + " needs M > 2·N_F (M = " + std::to_string(m) + ")");
  }
  const Vector all = fft_coefficients(samples);
  const auto mi = static_cast<long>(m);
  auto at = [&](long j) { return all[((j % mi) + mi) % mi]; };
  Vector coeffs(2 * window + 1);
  for (long j = -window; j <= window; ++j) coeffs[j + window] = at(j);
  double tail = 0.0;
  for (long j = window + 1; 2 * j < mi; ++j) tail += std::abs(at(j)) + std::abs(at(-j));
  return Symbol(std::move(coeffs), grid, samples, tail, std::move(source));
}

}  // namespace

CircleGrid::CircleGrid(std::size_t m) : m_(m) {
  if (m < 2) throw DomainError("circle grid needs M ≥ 2");
}

CircleGrid CircleGrid::for_window(std::size_t window) {
  return CircleGrid(next_pow2(std::max<std::size_t>(8 * window, 16)));
}

Vector CircleGrid::points() const {
  Vector p(static_cast<Eigen::Index>(m_));
  for (std::size_t i = 0; i < m_; ++i) p[static_cast<Eigen::Index>(i)] = point(i);
  return p;
}

Complex CircleGrid::quadrature_of_power(long j) const {
  Complex s(0.0, 0.0);
  const auto mi = static_cast<long>(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    // reduce the exponent so the angle stays in [0, 2π)
    const long e = ((static_cast<long>(i) * j) % mi + mi) % mi;
    s += std::polar(1.0, kTwoPi * static_cast<double>(e) / static_cast<double>(m_));
  }
  return s * weight();
}

Symbol::Symbol(const std::map<int, Complex>& coefficients) {
  for (const auto& [j, c] : coefficients) window_ = std::max(window_, std::abs(j));
  coeffs_ = Vector::Zero(2 * window_ + 1);
  for (const auto& [j, c] : coefficients) coeffs_[j + window_] += c;
  grid_ = CircleGrid::for_window(static_cast<std::size_t>(std::max(window_, 1)));
  samples_ = evaluate(grid_);
}

Symbol::Symbol(Vector coefficients, CircleGrid grid, Vector samples, double tail_bound, Function source)
    : window_(static_cast<int>((coefficients.size() - 1) / 2)),
      coeffs_(std::move(coefficients)),
      grid_(grid),
      samples_(std::move(samples)),
      tail_bound_(tail_bound),
      source_(std::move(source)) {}

Complex Symbol::coeff(long j) const {
  if (j < -window_ || j > window_) return {0.0, 0.0};
  return coeffs_[j + window_];
}

int Symbol::positive_degree() const {
  for (int j = window_; j >= 0; --j) {
    if (coeff(j) != Complex(0.0, 0.0)) return j;
  }
  return -1;
}

int Symbol::negative_degree() const {
  for (int j = window_; j >= 1; --j) {
    if (coeff(-j) != Complex(0.0, 0.0)) return j;
  }
  return 0;
}

double Symbol::l1_norm() const { return coeffs_.cwiseAbs().sum() + tail_bound_; }

Complex Symbol::operator()(Complex t) const {
  if (source_) return source_(t);
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) acc = acc * t + coeffs_[k];
  return acc * std::pow(t, -window_);
}

Vector Symbol::evaluate(const CircleGrid& grid) const {
  if (grid.size() == grid_.size() && samples_.size() == static_cast<Eigen::Index>(grid.size())) return samples_;
  Vector v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = (*this)(grid.point(i));
  return v;
}

bool Symbol::is_real_valued(double tol) const {
  const double scale = std::max(1.0, l1_norm());
  for (int j = 0; j <= window_; ++j) {
    if (std::abs(coeff(j) - std::conj(coeff(-j))) > tol * scale) return false;
  }
  return true;
}

double Symbol::real_lower_bound(std::size_t grid_size) const {
  const CircleGrid g(grid_size);
  const Vector v = evaluate(g);
  double lip = 0.0;
  for (int j = -window_; j <= window_; ++j) lip += std::abs(j) * std::abs(coeff(j));
  const double slack = kPi / static_cast<double>(grid_size) * lip + (source_ ? 0.0 : tail_bound_);
  return v.real().minCoeff() - slack;
}

Symbol analyze(const Symbol::Function& f, const CircleGrid& grid, int window) {
  Vector samples(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) samples[static_cast<Eigen::Index>(i)] = f(grid.point(i));
  return symbol_from_samples(samples, grid, window, f);
}

Symbol analyze(const Vector& samples, const CircleGrid& grid, int window) {
  if (samples.size() != static_cast<Eigen::Index>(grid.size())) throw DomainError("sample count differs from grid size");
  return symbol_from_samples(samples, grid, window, nullptr);
}

Symbol analyze(const Symbol::Function& f, int window) {
  std::size_t m = next_pow2(std::max<std::size_t>(8 * static_cast<std::size_t>(std::max(window, 1)), 16));
  Symbol current = analyze(f, CircleGrid(m), window);
  while (2 * m <= kMaxAnalysisGrid) {
    m *= 2;
    Symbol refined = analyze(f, CircleGrid(m), window);
    const double change = (refined.coefficients() - current.coefficients()).cwiseAbs().maxCoeff();
    current = std::move(refined);
    if (change < 1e-12) return current;
  }
  throw ResolutionError("Fourier analysis did not stabilise below 1e-12 by M = 2^20");
}

Symbol flip(const Symbol& a) {
  const Vector c = a.coefficients().reverse();
  const auto m = a.grid().size();
  const Vector& s = a.samples();
  Vector fs(s.size());
  for (std::size_t i = 0; i < m; ++i) fs[static_cast<Eigen::Index>(i)] = s[static_cast<Eigen::Index>((m - i) % m)];
  Symbol::Function src;
  if (!a.is_trig_polynomial()) src = [a](Complex t) { return a(1.0 / t); };
  Symbol out(c, a.grid(), fs, a.tail_bound(), src);
  out.set_tag("flip(" + a.tag() + ")");
  return out;
}

Symbol conjugate(const Symbol& a) {
  const Vector c = a.coefficients().reverse().conjugate();
  Symbol::Function src;
  if (!a.is_trig_polynomial()) src = [a](Complex t) { return std::conj(a(t)); };
  Symbol out(c, a.grid(), a.samples().conjugate(), a.tail_bound(), src);
  out.set_tag("conj(" + a.tag() + ")");
  return out;
}

Symbol multiply(const Symbol& a, const Symbol& b) {
  const int wa = a.window();
  const int wb = b.window();
  const int w = wa + wb;
  Vector c = Vector::Zero(2 * w + 1);
  for (int i = -wa; i <= wa; ++i) {
    const Complex ai = a.coeff(i);
    if (ai == Complex(0.0, 0.0)) continue;
    for (int j = -wb; j <= wb; ++j) c[i + j + w] += ai * b.coeff(j);
  }
  const double tail = a.l1_norm() * b.tail_bound() + b.l1_norm() * a.tail_bound() + a.tail_bound() * b.tail_bound();
  const CircleGrid grid = CircleGrid::for_window(static_cast<std::size_t>(std::max(w, 1)));
  Symbol::Function src;
  if (tail > 0.0) src = [a, b](Complex t) { return a(t) * b(t); };
  Vector samples(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Complex t = grid.point(i);
    samples[static_cast<Eigen::Index>(i)] = a(t) * b(t);
  }
  Symbol out(std::move(c), grid, std::move(samples), tail, src);
  out.set_tag(a.tag() + "*" + b.tag());
  return out;
}

OperatorMatrix toeplitz_matrix(const Symbol& a, std::size_t n) {
  if (n == 0) throw DomainError("toeplitz_matrix needs N ≥ 1");
  OperatorMatrix out;
  const auto ni = static_cast<Eigen::Index>(n);
  out.entries.resize(ni, ni);
  for (Eigen::Index j = 0; j < ni; ++j)
    for (Eigen::Index k = 0; k < ni; ++k) out.entries(j, k) = a.coeff(static_cast<long>(j - k));
  out.rows = out.cols = {BasisTag::Kind::Fourier, n, "fourier"};
  out.tail_warning = !a.is_trig_polynomial() && static_cast<long>(n) - 1 > a.window();
  return out;
}

Matrix hankel_block(const Symbol& a, std::size_t rows, std::size_t cols) {
  Matrix h(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < h.rows(); ++j)
    for (Eigen::Index k = 0; k < h.cols(); ++k) h(j, k) = a.coeff(static_cast<long>(j + k + 1));
  return h;
}

OperatorMatrix hankel_matrix(const Symbol& a, std::size_t n) {
  if (n == 0) throw DomainError("hankel_matrix needs N ≥ 1");
  OperatorMatrix out;
  out.entries = hankel_block(a, n, n);
  out.rows = out.cols = {BasisTag::Kind::Fourier, n, "fourier"};
  out.tail_warning = !a.is_trig_polynomial() && 2 * static_cast<long>(n) - 1 > a.window();
  return out;
}

Residual classical_widom_residual(const Symbol& a, const Symbol& b, std::size_t n, std::size_t window) {
  if (n == 0 || n > window) throw DomainError("classical Widom residual needs 1 ≤ n ≤ N");
  const auto big = static_cast<Eigen::Index>(window);
  const auto ni = static_cast<Eigen::Index>(n);

  Matrix pn = Matrix::Zero(big, big);
  pn.topLeftCorner(ni, ni).setIdentity();
  const Matrix rn = hankel_matrix(Symbol::monomial(static_cast<int>(n)), window).entries;

  const Matrix tab = toeplitz_matrix(multiply(a, b), window).entries;
  const Matrix ta = toeplitz_matrix(a, window).entries;
  const Matrix tb = toeplitz_matrix(b, window).entries;
  const Matrix ha = hankel_matrix(a, window).entries;
  const Matrix hb = hankel_matrix(b, window).entries;
  const Matrix h_flip_a = hankel_matrix(flip(a), window).entries;
  const Matrix h_flip_b = hankel_matrix(flip(b), window).entries;

  const Matrix lhs = pn * tab * pn;
  const Matrix rhs = pn * ta * pn * tb * pn + pn * ha * h_flip_b * pn + rn * h_flip_a * hb * rn;
  const NormPair r = norms(lhs - rhs);

  auto degree = [](const Symbol& s) { return std::max(s.positive_degree(), s.negative_degree()); };
  Residual out{r.spectral, r.frobenius, false};
  out.truncation_flag = !a.is_trig_polynomial() || !b.is_trig_polynomial() ||
                        static_cast<long>(window) < static_cast<long>(n) + degree(a) + degree(b);
  return out;
}

}  // namespace ttofs
