#pragma once

// Sparse multivariate polynomials over an exact (Rational) or floating
// (double) coefficient field. Variables are indexed 1..dimension.

#include "gamma_lab/errors.hpp"
#include "gamma_lab/rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace gamma_lab {

/// Product of variable powers, stored as (variable, exponent) pairs sorted
/// by variable. Zero exponents are never stored; the empty monomial is 1.
class Monomial {
 public:
  using Factor = std::pair<std::uint32_t, std::uint32_t>;

  Monomial() = default;

  /// Normalizes: sorts by variable, merges repeated variables, drops zero exponents.
  explicit Monomial(std::vector<Factor> factors) {
    std::sort(factors.begin(), factors.end());
    for (const auto& [var, exp] : factors) {
      if (var == 0) throw DimensionError("variable indices start at 1");
      if (exp == 0) continue;
      if (!factors_.empty() && factors_.back().first == var) {
        factors_.back().second += exp;
      } else {
        factors_.emplace_back(var, exp);
      }
    }
  }

  static Monomial variable(std::uint32_t var, std::uint32_t power = 1) {
    return Monomial({{var, power}});
  }

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  bool is_one() const noexcept { return factors_.empty(); }

  unsigned degree() const noexcept {
    unsigned d = 0;
    for (const auto& f : factors_) d += f.second;
    return d;
  }

  std::uint32_t exponent(std::uint32_t var) const noexcept {
    auto it = std::lower_bound(factors_.begin(), factors_.end(), Factor{var, 0});
    return (it != factors_.end() && it->first == var) ? it->second : 0;
  }

  std::uint32_t max_variable() const noexcept { return factors_.empty() ? 0 : factors_.back().first; }

  bool is_multilinear() const noexcept {
    return std::all_of(factors_.begin(), factors_.end(), [](const Factor& f) { return f.second == 1; });
  }

  /// Same monomial with x_var raised to `exp` (0 removes the variable).
  Monomial with_exponent(std::uint32_t var, std::uint32_t exp) const {
    Monomial out;
    out.factors_.reserve(factors_.size() + 1);
    bool placed = false;
    for (const auto& f : factors_) {
      if (!placed && f.first >= var) {
        if (exp > 0) out.factors_.emplace_back(var, exp);
        placed = true;
        if (f.first == var) continue;
      }
      out.factors_.push_back(f);
    }
    if (!placed && exp > 0) out.factors_.emplace_back(var, exp);
    return out;
  }

  Monomial operator*(const Monomial& other) const {
    Monomial out;
    out.factors_.reserve(factors_.size() + other.factors_.size());
    auto a = factors_.begin();
    auto b = other.factors_.begin();
    while (a != factors_.end() || b != other.factors_.end()) {
      if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
        out.factors_.push_back(*a++);
      } else if (a == factors_.end() || b->first < a->first) {
        out.factors_.push_back(*b++);
      } else {
        out.factors_.emplace_back(a->first, a->second + b->second);
        ++a;
        ++b;
      }
    }
    return out;
  }

  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;

 private:
  std::vector<Factor> factors_;
};

template <Coefficient T>
class Polynomial {
 public:
  using coefficient_type = T;
  using term_map = std::map<Monomial, T>;

  explicit Polynomial(std::size_t dimension = 1) : dimension_(dimension) {
    if (dimension == 0) throw DimensionError("polynomial dimension must be positive");
  }

  Polynomial(std::size_t dimension, const term_map& terms) : Polynomial(dimension) {
    for (const auto& [m, c] : terms) add_term(m, c);
  }

  static Polynomial constant(std::size_t dimension, const T& c) {
    Polynomial p(dimension);
    p.add_term(Monomial{}, c);
    return p;
  }

  static Polynomial variable(std::size_t dimension, std::uint32_t var) {
    Polynomial p(dimension);
    p.add_term(Monomial::variable(var), T(1));
    return p;
  }

  static Polynomial term(std::size_t dimension, const Monomial& m, const T& c) {
    Polynomial p(dimension);
    p.add_term(m, c);
    return p;
  }

  std::size_t dimension() const noexcept { return dimension_; }
  const term_map& terms() const noexcept { return terms_; }
  std::size_t num_terms() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  bool is_constant() const noexcept {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
  }

  /// Total degree; std::nullopt for the zero polynomial.
  std::optional<unsigned> degree() const noexcept {
    if (terms_.empty()) return std::nullopt;
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max(d, t.first.degree());
    return d;
  }

  unsigned degree_in(std::uint32_t var) const noexcept {
    unsigned d = 0;
    for (const auto& t : terms_) d = std::max<unsigned>(d, t.first.exponent(var));
    return d;
  }

  bool is_multilinear() const noexcept {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.is_multilinear(); });
  }

  T coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? T(0) : it->second;
  }

  T constant_term() const { return coefficient(Monomial{}); }

  /// Adds c·m to the polynomial; exact zeros are pruned (no epsilon pruning).
  void add_term(const Monomial& m, const T& c) {
    if (m.max_variable() > dimension_) {
      throw DimensionError("monomial uses x" + std::to_string(m.max_variable()) + " in dimension " +
                           std::to_string(dimension_));
    }
    if (is_zero_coef(c)) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (is_zero_coef(it->second)) terms_.erase(it);
    }
  }

  Polynomial operator-() const {
    Polynomial out(dimension_);
    for (const auto& [m, c] : terms_) out.terms_.emplace_hint(out.terms_.end(), m, T(-c));
    return out;
  }

  Polynomial& operator+=(const Polynomial& other) {
    require_same_dimension(other);
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& other) {
    require_same_dimension(other);
    for (const auto& [m, c] : other.terms_) add_term(m, T(-c));
    return *this;
  }

  Polynomial& operator*=(const T& s) {
    if (is_zero_coef(s)) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      // Underflow in double mode can create exact zeros.
      if (is_zero_coef(it->second)) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.require_same_dimension(b);
    Polynomial out(a.dimension_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) {
        T prod = ca * cb;
        out.add_term(ma * mb, prod);
      }
    }
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.dimension_ == b.dimension_ && a.terms_ == b.terms_;
  }

  /// Evaluates at x (x.size() must equal the dimension). The value type X may
  /// differ from T, e.g. evaluating an exact polynomial at double points.
  template <class X>
  X evaluate(std::span<const X> x) const {
    if (x.size() != dimension_) {
      throw DimensionError("evaluation point has " + std::to_string(x.size()) + " coordinates, polynomial has " +
                           std::to_string(dimension_));
    }
    X total(0);
    for (const auto& [m, c] : terms_) {
      X value = convert<X>(c);
      for (const auto& [var, exp] : m.factors()) {
        const X& xi = x[var - 1];
        for (std::uint32_t k = 0; k < exp; ++k) value *= xi;
      }
      total += value;
    }
    return total;
  }

  template <class X>
  X evaluate(const std::vector<X>& x) const {
    return evaluate(std::span<const X>(x));
  }

  void require_same_dimension(const Polynomial& other) const {
    if (other.dimension_ != dimension_) {
      throw DimensionError("dimension mismatch: " + std::to_string(dimension_) + " vs " +
                           std::to_string(other.dimension_));
    }
  }

 private:
  static bool is_zero_coef(const T& c) { return gamma_lab::is_zero(c); }

  template <class X>
  static X convert(const T& c) {
    if constexpr (std::is_same_v<X, T>) {
      return c;
    } else {
      return X(to_double(c));
    }
  }

  std::size_t dimension_;
  term_map terms_;
};

using ExactPolynomial = Polynomial<Rational>;
using RealPolynomial = Polynomial<double>;

/// Formal derivative with respect to x_var.
template <Coefficient T>
Polynomial<T> partial_derivative(const Polynomial<T>& p, std::uint32_t var) {
  if (var == 0 || var > p.dimension()) {
    throw DimensionError("partial derivative index " + std::to_string(var) + " outside 1.." +
                         std::to_string(p.dimension()));
  }
  Polynomial<T> out(p.dimension());
  for (const auto& [m, c] : p.terms()) {
    std::uint32_t e = m.exponent(var);
    if (e == 0) continue;
    T coef = c * T(static_cast<long>(e));
    out.add_term(m.with_exponent(var, e - 1), coef);
  }
  return out;
}

template <Coefficient T>
Polynomial<T> pow(const Polynomial<T>& p, unsigned k) {
  Polynomial<T> result = Polynomial<T>::constant(p.dimension(), T(1));
  Polynomial<T> base = p;
  while (k > 0) {
    if (k & 1U) result = result * base;
    k >>= 1U;
    if (k > 0) base = base * base;
  }
  return result;
}

/// phi ∘ f for a univariate phi (dimension 1, variable x1).
template <Coefficient T>
Polynomial<T> compose(const Polynomial<T>& phi, const Polynomial<T>& f) {
  if (phi.dimension() != 1) throw DimensionError("outer polynomial of a composition must be univariate");
  Polynomial<T> out(f.dimension());
  unsigned top = phi.degree().value_or(0);
  // Horner in the polynomial ring.
  for (int k = static_cast<int>(top); k >= 0; --k) {
    out = out * f;
    out.add_term(Monomial{}, phi.coefficient(k == 0 ? Monomial{} : Monomial::variable(1, k)));
  }
  return out;
}

/// Re-embeds p into a space of `dimension` variables (must cover every used variable).
template <Coefficient T>
Polynomial<T> with_dimension(const Polynomial<T>& p, std::size_t dimension) {
  Polynomial<T> out(dimension);
  for (const auto& [m, c] : p.terms()) out.add_term(m, c);
  return out;
}

/// Univariate polynomial u(x) placed on variable x_var of a dimension-`dimension` space.
template <Coefficient T>
Polynomial<T> embed_univariate(const Polynomial<T>& u, std::uint32_t var, std::size_t dimension) {
  if (u.dimension() != 1) throw DimensionError("embed_univariate expects a univariate polynomial");
  Polynomial<T> out(dimension);
  for (const auto& [m, c] : u.terms()) {
    out.add_term(m.is_one() ? Monomial{} : Monomial::variable(var, m.exponent(1)), c);
  }
  return out;
}

inline RealPolynomial to_real(const ExactPolynomial& p) {
  RealPolynomial out(p.dimension());
  for (const auto& [m, c] : p.terms()) out.add_term(m, to_double(c));
  return out;
}

inline const RealPolynomial& to_real(const RealPolynomial& p) { return p; }

/// Exact conversion of every double coefficient via its shortest decimal text.
inline ExactPolynomial to_exact(const RealPolynomial& p) {
  ExactPolynomial out(p.dimension());
  for (const auto& [m, c] : p.terms()) out.add_term(m, rational_from_shortest(c));
  return out;
}

/// Coefficient-wise agreement: |a_m − b_m| ≤ rel_tol · max(1, max|coef|).
bool approx_equal(const RealPolynomial& a, const RealPolynomial& b, double rel_tol);

/// Human-readable form, e.g. "x1^2*x2 - 3/2*x1 + 1".
template <Coefficient T>
std::string to_display_string(const Polynomial<T>& p);

// ---- JSON text format --------------------------------------------------------
//   {"dim": m, "terms": [{"exps": [[var, power], ...], "coef": <number|string>}, ...]}
// Rational coefficients print as JSON numbers when they are short finite
// decimals and as "p/q" strings otherwise, so parse(print(p)) == p exactly.

nlohmann::json to_json(const ExactPolynomial& p);
nlohmann::json to_json(const RealPolynomial& p);

template <Coefficient T>
Polynomial<T> polynomial_from_json(const nlohmann::json& j);

/// Stable 64-bit FNV-1a hash of the polynomial's JSON text.
std::uint64_t polynomial_hash(const RealPolynomial& p);

}  // namespace gamma_lab
