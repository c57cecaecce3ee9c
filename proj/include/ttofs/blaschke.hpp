#pragma once

#include "ttofs/core.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace ttofs {

/// A zero λ of a Blaschke product together with its modulus deficit
/// δ = 1 − |λ|. Generated families know δ exactly, which keeps 1 − |λ|²
/// accurate even when |λ| rounds to 1 in double precision.
struct Zero {
  Complex value;
  double deficit = 1.0;

  static Zero from_value(Complex lambda);
  static Zero polar(double deficit, double angle);

  double modulus() const { return 1.0 - deficit; }
  /// 1 − |λ|², computed as δ(2 − δ).
  double defect() const { return deficit * (2.0 - deficit); }
  /// λ/|λ|, or 1 for λ = 0.
  Complex phase() const;
  bool is_origin() const { return deficit >= 1.0; }
};

/// θ_k = offset + direction·2πk/period; period 0 means constant angle.
struct AngleRule {
  double offset = 0.0;
  int period = 0;
  int direction = 1;

  double angle(std::size_t k) const;
  AngleRule reflected() const { return {-offset, period, -direction}; }
};

struct ExplicitList {
  std::vector<Complex> zeros;
};

/// λ_k = (1 − ratio^k) e^{iθ_k}, k ≥ 1.
struct GeometricRadius {
  double ratio = 0.5;
  AngleRule angles;
};

/// λ_k = (1 − scale/(k+1)) e^{iθ_k}; violates the Blaschke condition.
struct HarmonicRadius {
  double scale = 1.0;
  AngleRule angles;
};

/// `prefix` zeros at the origin followed by an optional geometric tail.
struct AllZeroPrefix {
  std::size_t prefix = 1;
  std::optional<GeometricRadius> tail;
};

/// Programmatic generator; its Blaschke verdict is unknown.
struct CustomGenerator {
  std::string name;
  std::function<Zero(std::size_t)> zero;
};

using Family = std::variant<ExplicitList, GeometricRadius, HarmonicRadius, AllZeroPrefix, CustomGenerator>;

enum class BlaschkeVerdict { Converging, Diverging, Unknown };

std::string to_string(BlaschkeVerdict v);

class BlaschkeProduct {
 public:
  explicit BlaschkeProduct(Family family);

  static BlaschkeProduct from_zeros(const std::vector<Complex>& zeros);
  static BlaschkeProduct geometric(double ratio, AngleRule angles = {});

  const Family& family() const { return family_; }
  std::string family_name() const;

  /// Number of zeros, or nullopt for an infinite product.
  std::optional<std::size_t> size() const;
  bool is_finite() const { return size().has_value(); }

  /// k-th zero, 1-based as in u = Π_{k≥1} b_{λ_k}.
  Zero zero(std::size_t k) const;
  /// First n zeros; throws DomainError if fewer exist.
  std::vector<Zero> zeros(std::size_t n) const;

  /// The ordering flag over the first n zeros: |λ_k| ≤ |λ_{k+1}|.
  bool is_ordered(std::size_t n) const;

 private:
  Family family_;
  std::vector<Zero> materialized_;  // explicit lists, sorted
};

/// Single Blaschke factor b_λ(z); throws DomainError for |λ| ≥ 1.
Complex factor_eval(Complex lambda, Complex z);
/// Deficit-aware evaluation; accurate on the circle for |λ| → 1.
Complex factor_eval(const Zero& zero, Complex z);
/// 1 − conj(λ) z, free of cancellation for z on the circle near λ/|λ|.
Complex kernel_denominator(const Zero& zero, Complex z);

Complex partial_product_eval(const BlaschkeProduct& u, std::size_t n, Complex z);
Complex partial_product_eval(std::span<const Zero> zeros, Complex z);

struct BlaschkeCheck {
  double partial_sum = 0.0;
  BlaschkeVerdict verdict = BlaschkeVerdict::Unknown;
};

BlaschkeCheck check_blaschke_condition(const BlaschkeProduct& u, std::size_t n);

/// Product with zeros conj(λ_k); equals conj(ũ) on the circle.
BlaschkeProduct reflect(const BlaschkeProduct& u);

struct BoundaryClusterEstimate {
  std::vector<Complex> points;
  double radius_used = 0.0;
  std::size_t count_used = 0;
  bool empty_warning = false;
};

BoundaryClusterEstimate boundary_cluster(const BlaschkeProduct& u, std::size_t n, double radius,
                                         double angular_tolerance = 1e-8);

/// Closed-form σ(u) ∩ T for the named families; nullopt when unknown.
/// An empty vector means the product is finite.
std::optional<std::vector<Complex>> analytic_cluster_set(const BlaschkeProduct& u);

/// Taylor coefficients 0..length−1 of Π_{k} b_{λ_k}.
Vector taylor_coefficients(std::span<const Zero> zeros, std::size_t length);

namespace series {

/// s ← s · b_λ, truncated to s.size().
void multiply_by_factor(Vector& s, const Zero& zero);
/// s ← s / (1 − conj(λ) z), truncated to s.size().
void divide_by_kernel(Vector& s, const Zero& zero);

}  // namespace series

}  // namespace ttofs
