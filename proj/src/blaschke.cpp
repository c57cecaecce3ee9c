#include "ttofs/blaschke.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ttofs {

namespace {

constexpr double kExplicitModulusLimit = 1.0 - 1e-12;

double normalized_arg(Complex z) {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace

// (1 − w) + δ w where w = conj(λ/|λ|) z.
Complex kernel_denominator(const Zero& zero, Complex z) {
  const Complex w = std::conj(zero.phase()) * z;
  Complex one_minus_w;
  if (std::abs(std::abs(z) - 1.0) < 4.0 * std::numeric_limits<double>::epsilon()) {
    const double psi = std::arg(w);
    one_minus_w = Complex(0.0, -2.0 * std::sin(0.5 * psi)) * std::polar(1.0, 0.5 * psi);
  } else {
    one_minus_w = 1.0 - w;
  }
  return one_minus_w + zero.deficit * w;
}

namespace {

Zero geometric_zero(const GeometricRadius& g, std::size_t k) {
  const double deficit = std::pow(g.ratio, static_cast<double>(k));
  if (!(deficit > 0.0)) {
    throw DomainError("geometric-radius zero " + std::to_string(k) + " underflows onto the circle");
  }
  return Zero::polar(deficit, g.angles.angle(k));
}

void validate_angles(const AngleRule& r) {
  if (r.period < 0) throw DomainError("angle period must be nonnegative");
  if (r.direction != 1 && r.direction != -1) throw DomainError("angle direction must be ±1");
}

void validate_geometric(const GeometricRadius& g) {
  if (!(g.ratio > 0.0 && g.ratio < 1.0)) throw DomainError("geometric ratio must lie in (0,1)");
  validate_angles(g.angles);
}

std::vector<Complex> rule_cluster(const AngleRule& r) {
  if (r.period == 0) return {std::polar(1.0, r.offset)};
  std::vector<Complex> pts;
  for (int j = 0; j < r.period; ++j) pts.push_back(std::polar(1.0, r.offset + kTwoPi * j / r.period));
  return pts;
}

}  // namespace

Zero Zero::from_value(Complex lambda) {
  const double m = std::abs(lambda);
  if (!(m < 1.0)) throw DomainError("zero must lie in the open unit disk");
  return {lambda, 1.0 - m};
}

Zero Zero::polar(double deficit, double angle) {
  if (!(deficit > 0.0 && deficit <= 1.0)) throw DomainError("modulus deficit must lie in (0,1]");
  if (deficit == 1.0) return {Complex(0.0, 0.0), 1.0};
  return {std::polar(1.0 - deficit, angle), deficit};
}

Complex Zero::phase() const {
  if (is_origin()) return {1.0, 0.0};
  return value / std::abs(value);
}

double AngleRule::angle(std::size_t k) const {
  if (period == 0) return offset;
  // reduce k mod period first so large k stays exact
  const auto r = static_cast<double>(k % static_cast<std::size_t>(period));
  return offset + direction * kTwoPi * r / period;
}

std::string to_string(BlaschkeVerdict v) {
  switch (v) {
    case BlaschkeVerdict::Converging: return "converging";
    case BlaschkeVerdict::Diverging: return "diverging";
    case BlaschkeVerdict::Unknown: return "unknown";
  }
  return "unknown";
}

BlaschkeProduct::BlaschkeProduct(Family family) : family_(std::move(family)) {
  if (auto* list = std::get_if<ExplicitList>(&family_)) {
    std::vector<std::size_t> order(list->zeros.size());
    std::iota(order.begin(), order.end(), 0);
    for (const Complex& z : list->zeros) {
      if (!(std::abs(z) < kExplicitModulusLimit)) {
        throw DomainError("explicit zero has modulus ≥ 1 − 1e−12");
      }
    }
    // ties in modulus broken by argument in [0, 2π), then input order
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double ma = std::abs(list->zeros[a]);
      const double mb = std::abs(list->zeros[b]);
      if (ma != mb) return ma < mb;
      return normalized_arg(list->zeros[a]) < normalized_arg(list->zeros[b]);
    });
    std::vector<Complex> sorted;
    for (std::size_t i : order) {
      sorted.push_back(list->zeros[i]);
      materialized_.push_back(Zero::from_value(list->zeros[i]));
    }
    list->zeros = std::move(sorted);
  } else if (auto* g = std::get_if<GeometricRadius>(&family_)) {
    validate_geometric(*g);
  } else if (auto* h = std::get_if<HarmonicRadius>(&family_)) {
    if (!(h->scale > 0.0 && h->scale < 2.0)) throw DomainError("harmonic scale must lie in (0,2)");
    validate_angles(h->angles);
  } else if (auto* p = std::get_if<AllZeroPrefix>(&family_)) {
    if (p->tail) validate_geometric(*p->tail);
  } else if (auto* c = std::get_if<CustomGenerator>(&family_)) {
    if (!c->zero) throw DomainError("custom generator has no rule");
  }
}

BlaschkeProduct BlaschkeProduct::from_zeros(const std::vector<Complex>& zeros) {
  return BlaschkeProduct(ExplicitList{zeros});
}

BlaschkeProduct BlaschkeProduct::geometric(double ratio, AngleRule angles) {
  return BlaschkeProduct(GeometricRadius{ratio, angles});
}

std::string BlaschkeProduct::family_name() const {
  struct {
    std::string operator()(const ExplicitList&) const { return "explicit"; }
    std::string operator()(const GeometricRadius&) const { return "geometric-radius"; }
    std::string operator()(const HarmonicRadius&) const { return "harmonic-radius"; }
    std::string operator()(const AllZeroPrefix&) const { return "all-zero-prefix"; }
    std::string operator()(const CustomGenerator& c) const { return c.name; }
  } visitor;
  return std::visit(visitor, family_);
}

std::optional<std::size_t> BlaschkeProduct::size() const {
  if (std::holds_alternative<ExplicitList>(family_)) return materialized_.size();
  if (const auto* p = std::get_if<AllZeroPrefix>(&family_); p && !p->tail) return p->prefix;
  return std::nullopt;
}

Zero BlaschkeProduct::zero(std::size_t k) const {
  if (k == 0) throw DomainError("zeros are indexed from 1");
  if (auto n = size(); n && k > *n) {
    throw DomainError("product has only " + std::to_string(*n) + " zeros, requested " + std::to_string(k));
  }
  if (std::holds_alternative<ExplicitList>(family_)) return materialized_[k - 1];
  if (const auto* g = std::get_if<GeometricRadius>(&family_)) return geometric_zero(*g, k);
  if (const auto* h = std::get_if<HarmonicRadius>(&family_)) {
    return Zero::polar(h->scale / static_cast<double>(k + 1), h->angles.angle(k));
  }
  if (const auto* p = std::get_if<AllZeroPrefix>(&family_)) {
    if (k <= p->prefix) return {Complex(0.0, 0.0), 1.0};
    return geometric_zero(*p->tail, k - p->prefix);
  }
  const auto& c = std::get<CustomGenerator>(family_);
  Zero z = c.zero(k);
  if (!(z.deficit > 0.0 && z.deficit <= 1.0)) throw DomainError("custom generator produced a zero outside the disk");
  return z;
}

std::vector<Zero> BlaschkeProduct::zeros(std::size_t n) const {
  std::vector<Zero> out;
  out.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) out.push_back(zero(k));
  return out;
}

bool BlaschkeProduct::is_ordered(std::size_t n) const {
  if (auto s = size()) n = std::min(n, *s);
  double prev = -1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    // compare deficits: nondecreasing modulus = nonincreasing deficit
    const double d = zero(k).deficit;
    if (k > 1 && d > prev) return false;
    prev = d;
  }
  return true;
}

Complex factor_eval(Complex lambda, Complex z) {
  const double m = std::abs(lambda);
  if (!(m < 1.0)) throw DomainError("Blaschke factor requires |λ| < 1");
  if (m == 0.0) return z;
  return ((lambda - z) / (1.0 - std::conj(lambda) * z)) * (m / lambda);
}

Complex factor_eval(const Zero& zero, Complex z) {
  if (zero.is_origin()) return z;
  // b_λ(z) = |λ| − conj(λ/|λ|) (1 − |λ|²) z / (1 − conj(λ) z)
  return zero.modulus() - std::conj(zero.phase()) * zero.defect() * z / kernel_denominator(zero, z);
}

Complex partial_product_eval(std::span<const Zero> zeros, Complex z) {
  Complex p(1.0, 0.0);
  for (const Zero& zero : zeros) p *= factor_eval(zero, z);
  return p;
}

Complex partial_product_eval(const BlaschkeProduct& u, std::size_t n, Complex z) {
  if (n == 0) throw DomainError("partial product order must be ≥ 1");
  const auto zs = u.zeros(n);
  return partial_product_eval(std::span<const Zero>(zs), z);
}

BlaschkeCheck check_blaschke_condition(const BlaschkeProduct& u, std::size_t n) {
  BlaschkeCheck out;
  if (auto s = u.size()) n = std::min(n, *s);
  for (std::size_t k = 1; k <= n; ++k) out.partial_sum += u.zero(k).deficit;

  struct {
    BlaschkeVerdict operator()(const ExplicitList&) const { return BlaschkeVerdict::Converging; }
    BlaschkeVerdict operator()(const GeometricRadius&) const { return BlaschkeVerdict::Converging; }
    BlaschkeVerdict operator()(const HarmonicRadius&) const { return BlaschkeVerdict::Diverging; }
    BlaschkeVerdict operator()(const AllZeroPrefix&) const { return BlaschkeVerdict::Converging; }
    BlaschkeVerdict operator()(const CustomGenerator&) const { return BlaschkeVerdict::Unknown; }
  } verdict;
  out.verdict = std::visit(verdict, u.family());
  return out;
}

BlaschkeProduct reflect(const BlaschkeProduct& u) {
  struct {
    Family operator()(const ExplicitList& l) const {
      ExplicitList r;
      for (const Complex& z : l.zeros) r.zeros.push_back(std::conj(z));
      return r;
    }
    Family operator()(const GeometricRadius& g) const { return GeometricRadius{g.ratio, g.angles.reflected()}; }
    Family operator()(const HarmonicRadius& h) const { return HarmonicRadius{h.scale, h.angles.reflected()}; }
    Family operator()(const AllZeroPrefix& p) const {
      AllZeroPrefix r{p.prefix, std::nullopt};
      if (p.tail) r.tail = GeometricRadius{p.tail->ratio, p.tail->angles.reflected()};
      return r;
    }
    Family operator()(const CustomGenerator& c) const {
      auto rule = c.zero;
      return CustomGenerator{c.name + "-reflected", [rule](std::size_t k) {
                               Zero z = rule(k);
                               return Zero{std::conj(z.value), z.deficit};
                             }};
    }
  } visitor;
  return BlaschkeProduct(std::visit(visitor, u.family()));
}

BoundaryClusterEstimate boundary_cluster(const BlaschkeProduct& u, std::size_t n, double radius,
                                         double angular_tolerance) {
  if (!(radius > 0.0 && radius < 1.0)) throw DomainError("cluster radius must lie in (0,1)");
  BoundaryClusterEstimate est;
  est.radius_used = radius;
  if (auto s = u.size()) n = std::min(n, *s);
  for (std::size_t k = 1; k <= n; ++k) {
    const Zero z = u.zero(k);
    if (z.is_origin() || z.modulus() < radius) continue;
    ++est.count_used;
    const Complex p = z.phase();
    const bool seen = std::any_of(est.points.begin(), est.points.end(), [&](Complex q) {
      return std::abs(std::arg(p / q)) < angular_tolerance;
    });
    if (!seen) est.points.push_back(p);
  }
  est.empty_warning = est.points.empty();
  return est;
}

std::optional<std::vector<Complex>> analytic_cluster_set(const BlaschkeProduct& u) {
  const Family& f = u.family();
  if (std::holds_alternative<ExplicitList>(f)) return std::vector<Complex>{};
  if (const auto* g = std::get_if<GeometricRadius>(&f)) return rule_cluster(g->angles);
  if (const auto* h = std::get_if<HarmonicRadius>(&f)) return rule_cluster(h->angles);
  if (const auto* p = std::get_if<AllZeroPrefix>(&f)) {
    if (!p->tail) return std::vector<Complex>{};
    return rule_cluster(p->tail->angles);
  }
  return std::nullopt;
}

namespace series {

void divide_by_kernel(Vector& s, const Zero& zero) {
  const Complex c = std::conj(zero.value);
  for (Eigen::Index m = 1; m < s.size(); ++m) s[m] += c * s[m - 1];
}

void multiply_by_factor(Vector& s, const Zero& zero) {
  if (s.size() == 0) return;
  if (zero.is_origin()) {
    for (Eigen::Index m = s.size() - 1; m > 0; --m) s[m] = s[m - 1];
    s[0] = 0.0;
    return;
  }
  Vector q = s;
  divide_by_kernel(q, zero);
  const Complex c = std::conj(zero.phase()) * zero.defect();
  const double r = zero.modulus();
  for (Eigen::Index m = s.size() - 1; m > 0; --m) s[m] = r * s[m] - c * q[m - 1];
  s[0] *= r;
}

}  // namespace series

Vector taylor_coefficients(std::span<const Zero> zeros, std::size_t length) {
  Vector s = Vector::Zero(static_cast<Eigen::Index>(length));
  if (length == 0) return s;
  s[0] = 1.0;
  for (const Zero& z : zeros) series::multiply_by_factor(s, z);
  return s;
}

}  // namespace ttofs
