#pragma once

// The three reference laws (standard Gaussian, Gamma(r,1), Beta(a,b) carried
// to [-1,1]), their exact moment engines and orthogonal eigenbases.

#include "gamma_lab/polynomial.hpp"
#include "gamma_lab/rational.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace gamma_lab {

enum class FamilyKind { gaussian, gamma, beta };

/// One-dimensional reference law. Beta(a,b) is represented on the canonical
/// support [-1,1] through x = 1 - 2B with B ~ Beta(a,b) on [0,1], so its
/// density is proportional to (1-x)^(a-1) (1+x)^(b-1).
class MeasureFamily {
 public:
  static MeasureFamily gaussian();
  /// Throws PreconditionError unless r >= 1 (log-concave range).
  static MeasureFamily gamma(const Rational& r);
  /// Throws PreconditionError unless a >= 1 and b >= 1 (log-concave range).
  static MeasureFamily beta(const Rational& a, const Rational& b);

  FamilyKind kind() const noexcept { return kind_; }
  const Rational& r() const noexcept { return p1_; }
  const Rational& a() const noexcept { return p1_; }
  const Rational& b() const noexcept { return p2_; }

  /// "gaussian", "gamma(r=2)", "beta(a=2,b=3/2)".
  std::string name() const;

  /// Config fragment {kind, r?, a?, b?}.
  nlohmann::json to_json() const;
  /// Parses {kind: "gaussian"|"gamma"|"beta", r?, a?, b?}. Unknown keys and
  /// missing parameters are ConfigError; out-of-domain values are PreconditionError.
  static MeasureFamily from_json(const nlohmann::json& j);

  double mean() const;
  double variance() const;

  /// Density and CDF on the canonical support.
  double density(double x) const;
  double cdf(double x) const;
  /// Support endpoints (±infinity where unbounded).
  double support_lower() const;
  double support_upper() const;

  bool operator==(const MeasureFamily&) const = default;

 private:
  MeasureFamily(FamilyKind kind, Rational p1, Rational p2) : kind_(kind), p1_(std::move(p1)), p2_(std::move(p2)) {}

  FamilyKind kind_;
  Rational p1_;
  Rational p2_;
};

/// Law of (X_1, ..., X_m) with i.i.d. coordinates.
struct ProductMeasure {
  ProductMeasure(MeasureFamily f, std::size_t m) : family(std::move(f)), dimension(m) {
    if (m == 0) throw DimensionError("product measure dimension must be positive");
  }

  MeasureFamily family;
  std::size_t dimension;
};

/// E[X^k] for X with the family's canonical law.
template <Coefficient T>
T raw_moment(const MeasureFamily& family, unsigned k);

/// E[X^0], ..., E[X^max_k].
template <Coefficient T>
std::vector<T> raw_moments(const MeasureFamily& family, unsigned max_k);

/// E[p(X)] by factorizing every monomial over independent coordinates.
template <Coefficient T>
T expectation(const Polynomial<T>& p, const ProductMeasure& mu);

/// E[p(X)^2] - E[p(X)]^2.
template <Coefficient T>
T variance(const Polynomial<T>& p, const ProductMeasure& mu);

/// Variance criterion for a polynomial functional: its law has a density iff Var > 0.
template <Coefficient T>
bool is_nondegenerate(const Polynomial<T>& p, const ProductMeasure& mu) {
  T v = variance(p, mu);
  if constexpr (std::same_as<T, double>) {
    return v > 0.0;
  } else {
    return sgn(v) > 0;
  }
}

/// Degree-i orthogonal polynomial of the family, stored with leading
/// coefficient ±1: Hermite He_i (monic), Laguerre i!·L_i^(r-1) (leading
/// (-1)^i, so L_1 = r - x), and monic Jacobi on [-1,1].
template <Coefficient T>
struct BasisPolynomial {
  MeasureFamily family;
  unsigned index;
  Polynomial<T> polynomial;  // dimension 1
  T norm_squared;            // E[polynomial(X)^2]
};

template <Coefficient T>
BasisPolynomial<T> basis(const MeasureFamily& family, unsigned i);

}  // namespace gamma_lab
