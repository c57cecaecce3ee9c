#include "ttofs/widom.hpp"

#include "ttofs/linalg.hpp"

#include <algorithm>

namespace ttofs {

namespace {

constexpr double kTailTolerance = 1e-10;

// Rows of H(a) (equivalently columns) that can be nonzero.
std::size_t positive_extent(const Symbol& s) {
  return static_cast<std::size_t>(s.is_trig_polynomial() ? std::max(s.positive_degree(), 0) : s.window());
}

std::size_t negative_extent(const Symbol& s) {
  return static_cast<std::size_t>(s.is_trig_polynomial() ? s.negative_degree() : s.window());
}

// H(ã)H(b), d1 × d2 with d1 = negative extent of a, d2 = positive extent of b.
Matrix reflected_hankel_product(const Symbol& a, const Symbol& b, std::size_t d1, std::size_t d2) {
  const std::size_t inner = std::min(negative_extent(a), positive_extent(b));
  return hankel_block(flip(a), d1, inner) * hankel_block(b, inner, d2);
}

// Columns 0..cols−1 of the Hankel matrix [c(j+k+1)] with `rows` rows.
Matrix hankel_columns(const Vector& c, std::size_t rows, std::size_t cols) {
  Matrix h(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < h.rows(); ++j)
    for (Eigen::Index k = 0; k < h.cols(); ++k) h(j, k) = c[j + k + 1];
  return h;
}

// E^* H(s) restricted to the first `cols` columns, exact because the columns
// of H(s) are supported on the first positive_extent(s) modes.
Matrix model_hankel(std::span<const Zero> zeros, const Symbol& s, std::size_t cols) {
  const std::size_t rows = positive_extent(s);
  const auto n = static_cast<Eigen::Index>(zeros.size());
  if (rows == 0 || cols == 0) return Matrix::Zero(n, static_cast<Eigen::Index>(cols));
  return tm_embedding(zeros, rows).adjoint() * hankel_block(s, rows, cols);
}

Vector padded(const Vector& v, std::size_t size) {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(size));
  out.head(v.size()) = v;
  return out;
}

}  // namespace

WidomReport tto_widom_residual(const BlaschkeProduct& u, const Symbol& a, const Symbol& b, std::size_t n,
                               std::size_t window) {
  if (n == 0) throw DomainError("Widom residual needs n ≥ 1");
  if (window == 0) throw DomainError("Widom residual needs N_F ≥ 1");
  const auto zs = u.zeros(n);
  const Matrix e = tm_embedding(zs, window);

  const Matrix tab = tto_shift_algebra(zs, multiply(a, b));
  const Matrix ta = tto_shift_algebra(zs, a);
  const Matrix tb = tto_shift_algebra(zs, b);

  // E^* H(a) H(b̃) E through the inner index shared by both Hankels.
  const std::size_t inner = std::min({positive_extent(a), negative_extent(b), window});
  const Matrix ga = hankel_block(a, window, inner).adjoint() * e;
  const Matrix gb = hankel_block(flip(b), inner, window) * e;
  const Matrix z = tab - ta * tb - ga.adjoint() * gb;

  const std::size_t d1 = std::min(negative_extent(a), window);
  const std::size_t d2 = std::min(positive_extent(b), window);
  const Matrix y = reflected_hankel_product(a, b, d1, d2);
  const Vector c = taylor_coefficients(zs, window + std::max(d1, d2) + 1);

  const auto ni = static_cast<Eigen::Index>(n);
  const auto w = static_cast<Eigen::Index>(window);
  Matrix left(w, ni + static_cast<Eigen::Index>(d1));
  Matrix right(w, ni + static_cast<Eigen::Index>(d2));
  left << e, hankel_columns(c, window, d1);
  right << e, hankel_columns(c, window, d2);
  Matrix core = Matrix::Zero(left.cols(), right.cols());
  core.topLeftCorner(ni, ni) = z;
  core.bottomRightCorner(y.rows(), y.cols()) = -y;
  const NormPair r = factored_norms(left, core, right);

  WidomReport out;
  out.residual_spectral = r.spectral;
  out.residual_frobenius = r.frobenius;
  out.n = n;
  out.window = window;
  out.grid_size = std::max(a.grid().size(), b.grid().size());
  out.truncation_flag = !a.is_trig_polynomial() || !b.is_trig_polynomial() ||
                        tm_column_tails(zs, window).maxCoeff() >= kTailTolerance ||
                        std::max({positive_extent(a), negative_extent(a), positive_extent(b), negative_extent(b)}) > window;
  return out;
}

CompactCorrection compact_correction(const BlaschkeProduct& u, const Symbol& a, const Symbol& b, std::size_t window,
                                     std::size_t order) {
  if (window == 0) throw DomainError("compact correction needs N_F ≥ 1");
  if (order == 0) order = reference_order(u, 16);
  const auto zs = u.zeros(order);
  const std::size_t inner = std::min(positive_extent(a), negative_extent(b));
  const std::size_t d1 = negative_extent(a);
  const std::size_t d2 = positive_extent(b);
  const Matrix y = reflected_hankel_product(a, b, d1, d2);
  const Vector c = taylor_coefficients(zs, window + std::max(d1, d2) + 1);

  CompactCorrection out;
  out.order = order;
  out.k.entries = hankel_block(a, window, inner) * hankel_block(flip(b), inner, window) +
                  hankel_columns(c, window, d1) * y * hankel_columns(c, window, d2).adjoint();
  out.k.rows = out.k.cols = {BasisTag::Kind::Fourier, window, "fourier"};
  out.k.tail_warning = !a.is_trig_polynomial() || !b.is_trig_polynomial();
  return out;
}

std::vector<double> correction_defect(const BlaschkeProduct& u, const Symbol& a, const Symbol& b,
                                      const std::vector<std::size_t>& n_list) {
  if (n_list.empty()) return {};
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  const auto big = u.zeros(reference_order(u, n_max));
  const std::size_t inner = std::min(positive_extent(a), negative_extent(b));
  const std::size_t d1 = negative_extent(a);
  const std::size_t d2 = positive_extent(b);
  const Matrix y = reflected_hankel_product(a, b, d1, d2);
  const Matrix coords = hankel_coordinates(big, std::max(d1, d2));
  const Symbol ab = multiply(a, b);
  const Symbol conj_b = conjugate(b);

  std::vector<double> out;
  out.reserve(n_list.size());
  for (const auto n : n_list) {
    const std::span<const Zero> zs(big.data(), n);
    const auto ni = static_cast<Eigen::Index>(n);
    // H(b̃)^* = H(b̄), so E^* H(a) H(b̃) E = (E^*H(a)) (E^*H(b̄))^*.
    const Matrix hh = model_hankel(zs, a, inner) * model_hankel(zs, conj_b, inner).adjoint();
    const Matrix c = coords.topRows(ni);
    const Matrix g = tto_shift_algebra(zs, a) * tto_shift_algebra(zs, b) - tto_shift_algebra(zs, ab) + hh +
                     c.leftCols(static_cast<Eigen::Index>(d1)) * y * c.leftCols(static_cast<Eigen::Index>(d2)).adjoint();
    out.push_back(spectral_norm(g));
  }
  return out;
}

std::size_t FiniteRankOperator::support() const {
  std::size_t s = 0;
  for (const auto& t : terms) s = std::max({s, static_cast<std::size_t>(t.left.size()), static_cast<std::size_t>(t.right.size())});
  return s;
}

std::vector<double> corollary_convergence_residual(const BlaschkeProduct& u, const FiniteRankOperator& l,
                                                   const std::vector<std::size_t>& n_list, std::size_t window,
                                                   Representation rep) {
  if (n_list.empty()) return {};
  const std::size_t support = l.support();
  if (support > window) throw DomainError("rank-one vectors exceed the window");
  const std::size_t n_max = *std::max_element(n_list.begin(), n_list.end());
  const auto big = u.zeros(reference_order(u, n_max));
  std::vector<double> out;
  out.reserve(n_list.size());
  if (l.terms.empty() || support == 0) return std::vector<double>(n_list.size(), 0.0);

  if (rep == Representation::ModelCoordinates) {
    const Matrix hbig = hankel_coordinates(big, support);
    for (const auto n : n_list) {
      const std::span<const Zero> zs(big.data(), n);
      const Matrix hn = hankel_coordinates(zs, support);
      const auto ni = static_cast<Eigen::Index>(n);
      Matrix m = Matrix::Zero(ni, ni);
      for (const auto& t : l.terms) {
        const Vector x = padded(t.left, support);
        const Vector y = padded(t.right, support);
        const Vector hx = (hbig * x).head(ni);
        const Vector hy = (hbig * y).head(ni);
        m += t.coefficient * ((hn * x) * (hn * y).adjoint() - hx * hy.adjoint());
      }
      out.push_back(spectral_norm(m));
    }
    return out;
  }

  const Vector cbig = taylor_coefficients(big, window + support + 1);
  const Matrix hbig = hankel_columns(cbig, window, support);
  const auto terms = static_cast<Eigen::Index>(l.terms.size());
  const auto w = static_cast<Eigen::Index>(window);
  for (const auto n : n_list) {
    const std::span<const Zero> zs(big.data(), n);
    const Matrix e = tm_embedding(zs, window);
    const Matrix hn = hankel_columns(taylor_coefficients(zs, window + support + 1), window, support);
    Matrix left(w, 2 * terms);
    Matrix right(w, 2 * terms);
    Matrix core = Matrix::Zero(2 * terms, 2 * terms);
    for (Eigen::Index i = 0; i < terms; ++i) {
      const auto& t = l.terms[static_cast<std::size_t>(i)];
      const Vector x = padded(t.left, support);
      const Vector y = padded(t.right, support);
      left.col(i) = hn * x;
      right.col(i) = hn * y;
      left.col(terms + i) = e * (e.adjoint() * (hbig * x));
      right.col(terms + i) = e * (e.adjoint() * (hbig * y));
      core(i, i) = t.coefficient;
      core(terms + i, terms + i) = -t.coefficient;
    }
    out.push_back(factored_norms(left, core, right).spectral);
  }
  return out;
}

}  // namespace ttofs
