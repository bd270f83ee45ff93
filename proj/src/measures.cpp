#include "gamma_lab/measures.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace gamma_lab {
namespace {

Rational param_from_json(const nlohmann::json& v, const char* name) {
  try {
    if (v.is_number_integer()) return Rational(mpz_class(v.dump(), 10));
    if (v.is_number_float()) return rational_from_shortest(v.get<double>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad value for '") + name + "': " + e.what());
  }
  throw ConfigError(std::string("parameter '") + name + "' must be a number");
}

nlohmann::json param_to_json(const Rational& q) {
  if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
  if (has_finite_decimal(q) && rational_from_shortest(q.get_d()) == q) return q.get_d();
  return to_string(q);
}

// Rising factorial (x)_k in exact arithmetic.
Rational rising(const Rational& x, unsigned k) {
  Rational out(1);
  for (unsigned j = 0; j < k; ++j) out *= x + j;
  return out;
}

Rational binomial_int(unsigned n, unsigned k) {
  mpz_class c;
  mpz_bin_uiui(c.get_mpz_t(), n, k);
  return Rational(c);
}

// Generalized binomial C(top, k) = top (top-1) ... (top-k+1) / k!.
Rational binomial_gen(const Rational& top, unsigned k) {
  Rational out(1);
  for (unsigned t = 0; t < k; ++t) {
    out *= top - t;
    out /= t + 1;
  }
  return out;
}

std::vector<Rational> exact_moments(const MeasureFamily& family, unsigned max_k) {
  std::vector<Rational> m(max_k + 1);
  switch (family.kind()) {
    case FamilyKind::gaussian:
      for (unsigned k = 0; k <= max_k; ++k) {
        if (k % 2 == 1) {
          m[k] = 0;
        } else {
          m[k] = (k == 0) ? Rational(1) : Rational(m[k - 2] * (k - 1));
        }
      }
      break;
    case FamilyKind::gamma:
      m[0] = 1;
      for (unsigned k = 1; k <= max_k; ++k) m[k] = m[k - 1] * (family.r() + (k - 1));
      break;
    case FamilyKind::beta: {
      // B ~ Beta(a,b) on [0,1]: E[B^j] = prod_{i<j} (a+i)/(a+b+i); x = 1 - 2B.
      std::vector<Rational> mb(max_k + 1);
      mb[0] = 1;
      for (unsigned j = 1; j <= max_k; ++j) {
        mb[j] = mb[j - 1] * (family.a() + (j - 1)) / (family.a() + family.b() + (j - 1));
      }
      for (unsigned k = 0; k <= max_k; ++k) {
        Rational s(0);
        Rational pow_m2(1);
        for (unsigned j = 0; j <= k; ++j) {
          s += binomial_int(k, j) * pow_m2 * mb[j];
          pow_m2 *= -2;
        }
        m[k] = s;
      }
      break;
    }
  }
  return m;
}

Polynomial<Rational> hermite_exact(unsigned n) {
  // He_n(x) = n! sum_m (-1)^m x^(n-2m) / (m! (n-2m)! 2^m)
  Polynomial<Rational> p(1);
  mpz_class nfact;
  mpz_fac_ui(nfact.get_mpz_t(), n);
  for (unsigned m = 0; 2 * m <= n; ++m) {
    mpz_class mf, rf;
    mpz_fac_ui(mf.get_mpz_t(), m);
    mpz_fac_ui(rf.get_mpz_t(), n - 2 * m);
    mpz_class den = mf * rf;
    den <<= m;
    Rational c(nfact, den);
    c.canonicalize();
    if (m % 2 == 1) c = -c;
    p.add_term(n - 2 * m == 0 ? Monomial{} : Monomial::variable(1, n - 2 * m), c);
  }
  return p;
}

Polynomial<Rational> laguerre_exact(unsigned n, const Rational& alpha) {
  // n! L_n^(alpha)(x) = sum_j (-1)^j (n!/j!) C(n+alpha, n-j) x^j
  Polynomial<Rational> p(1);
  for (unsigned j = 0; j <= n; ++j) {
    Rational c = binomial_gen(alpha + n, n - j);
    mpz_class ratio(1);
    for (unsigned t = j + 1; t <= n; ++t) ratio *= t;
    c *= ratio;
    if (j % 2 == 1) c = -c;
    p.add_term(j == 0 ? Monomial{} : Monomial::variable(1, j), c);
  }
  return p;
}

Polynomial<Rational> jacobi_exact(unsigned n, const Rational& alpha, const Rational& beta) {
  // P_n^(alpha,beta)(x) = sum_s C(n+alpha, n-s) C(n+beta, s) ((x-1)/2)^s ((x+1)/2)^(n-s), made monic.
  Polynomial<Rational> xm1(1);
  xm1.add_term(Monomial::variable(1), Rational(1, 2));
  xm1.add_term(Monomial{}, Rational(-1, 2));
  Polynomial<Rational> xp1(1);
  xp1.add_term(Monomial::variable(1), Rational(1, 2));
  xp1.add_term(Monomial{}, Rational(1, 2));
  Polynomial<Rational> p(1);
  for (unsigned s = 0; s <= n; ++s) {
    Rational c = binomial_gen(alpha + n, n - s) * binomial_gen(beta + n, s);
    p += pow(xm1, s) * pow(xp1, n - s) * c;
  }
  Rational lead = p.coefficient(n == 0 ? Monomial{} : Monomial::variable(1, n));
  Rational inv = 1 / lead;
  return p * inv;
}

}  // namespace

MeasureFamily MeasureFamily::gaussian() { return MeasureFamily(FamilyKind::gaussian, Rational(0), Rational(0)); }

MeasureFamily MeasureFamily::gamma(const Rational& r) {
  if (r < 1) {
    throw PreconditionError("gamma family requires shape r >= 1 (log-concave case); got r = " + to_string(r));
  }
  return MeasureFamily(FamilyKind::gamma, r, Rational(0));
}

MeasureFamily MeasureFamily::beta(const Rational& a, const Rational& b) {
  if (a < 1 || b < 1) {
    throw PreconditionError("beta family requires a >= 1 and b >= 1 (log-concave case); got a = " + to_string(a) +
                            ", b = " + to_string(b));
  }
  return MeasureFamily(FamilyKind::beta, a, b);
}

std::string MeasureFamily::name() const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return "gaussian";
    case FamilyKind::gamma:
      return "gamma(r=" + to_string(p1_) + ")";
    case FamilyKind::beta:
      return "beta(a=" + to_string(p1_) + ",b=" + to_string(p2_) + ")";
  }
  return "unknown";
}

nlohmann::json MeasureFamily::to_json() const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return {{"kind", "gaussian"}};
    case FamilyKind::gamma:
      return {{"kind", "gamma"}, {"r", param_to_json(p1_)}};
    case FamilyKind::beta:
      return {{"kind", "beta"}, {"a", param_to_json(p1_)}, {"b", param_to_json(p2_)}};
  }
  return {};
}

MeasureFamily MeasureFamily::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("family must be an object like {\"kind\": \"gaussian\"}");
  if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("family needs a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : j.items()) {
      bool ok = key == "kind";
      for (const char* k : keys) ok = ok || key == k;
      if (!ok) throw ConfigError("unknown key '" + key + "' in " + kind + " family");
    }
    for (const char* k : keys) {
      if (!j.contains(k)) throw ConfigError(kind + " family requires '" + k + "'");
    }
  };
  if (kind == "gaussian") {
    allow({});
    return gaussian();
  }
  if (kind == "gamma") {
    allow({"r"});
    return gamma(param_from_json(j["r"], "r"));
  }
  if (kind == "beta") {
    allow({"a", "b"});
    return beta(param_from_json(j["a"], "a"), param_from_json(j["b"], "b"));
  }
  throw ConfigError("unknown family kind '" + kind + "' (expected gaussian, gamma or beta)");
}

double MeasureFamily::mean() const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return 0.0;
    case FamilyKind::gamma:
      return to_double(p1_);
    case FamilyKind::beta:
      return to_double(Rational((p2_ - p1_) / (p1_ + p2_)));
  }
  return 0.0;
}

double MeasureFamily::variance() const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return 1.0;
    case FamilyKind::gamma:
      return to_double(p1_);
    case FamilyKind::beta: {
      Rational s = p1_ + p2_;
      return to_double(Rational(4 * p1_ * p2_ / (s * s * (s + 1))));
    }
  }
  return 0.0;
}

double MeasureFamily::density(double x) const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case FamilyKind::gamma: {
      if (x < 0.0) return 0.0;
      const double r = to_double(p1_);
      if (x == 0.0) return r == 1.0 ? 1.0 : 0.0;
      return std::exp((r - 1.0) * std::log(x) - x - std::lgamma(r));
    }
    case FamilyKind::beta: {
      if (x < -1.0 || x > 1.0) return 0.0;
      const double a = to_double(p1_);
      const double b = to_double(p2_);
      const double t = 0.5 * (1.0 - x);
      return 0.5 * boost::math::ibeta_derivative(a, b, t);
    }
  }
  return 0.0;
}

double MeasureFamily::cdf(double x) const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return 0.5 * std::erfc(-x / std::numbers::sqrt2);
    case FamilyKind::gamma:
      return x <= 0.0 ? 0.0 : boost::math::gamma_p(to_double(p1_), x);
    case FamilyKind::beta: {
      if (x <= -1.0) return 0.0;
      if (x >= 1.0) return 1.0;
      // P(1 - 2B <= x) = P(B >= (1 - x)/2)
      return boost::math::ibetac(to_double(p1_), to_double(p2_), 0.5 * (1.0 - x));
    }
  }
  return 0.0;
}

double MeasureFamily::support_lower() const {
  switch (kind_) {
    case FamilyKind::gaussian:
      return -std::numeric_limits<double>::infinity();
    case FamilyKind::gamma:
      return 0.0;
    case FamilyKind::beta:
      return -1.0;
  }
  return 0.0;
}

double MeasureFamily::support_upper() const {
  return kind_ == FamilyKind::beta ? 1.0 : std::numeric_limits<double>::infinity();
}

template <Coefficient T>
std::vector<T> raw_moments(const MeasureFamily& family, unsigned max_k) {
  std::vector<Rational> exact = exact_moments(family, max_k);
  if constexpr (std::same_as<T, Rational>) {
    return exact;
  } else {
    std::vector<double> out(exact.size());
    for (std::size_t k = 0; k < exact.size(); ++k) out[k] = to_double(exact[k]);
    return out;
  }
}

template <Coefficient T>
T raw_moment(const MeasureFamily& family, unsigned k) {
  return raw_moments<T>(family, k)[k];
}

template <Coefficient T>
T expectation(const Polynomial<T>& p, const ProductMeasure& mu) {
  if (p.dimension() != mu.dimension) {
    throw DimensionError("expectation: polynomial dimension " + std::to_string(p.dimension()) +
                         " differs from measure dimension " + std::to_string(mu.dimension));
  }
  unsigned top = 0;
  for (const auto& [m, c] : p.terms()) {
    for (const auto& f : m.factors()) top = std::max(top, f.second);
  }
  const std::vector<T> moments = raw_moments<T>(mu.family, top);
  T total(0);
  for (const auto& [m, c] : p.terms()) {
    T value = c;
    for (const auto& f : m.factors()) value *= moments[f.second];
    total += value;
  }
  return total;
}

template <Coefficient T>
T variance(const Polynomial<T>& p, const ProductMeasure& mu) {
  T mean = expectation(p, mu);
  T second = expectation(p * p, mu);
  T v = second - mean * mean;
  return v;
}

template <Coefficient T>
BasisPolynomial<T> basis(const MeasureFamily& family, unsigned i) {
  Polynomial<Rational> exact(1);
  switch (family.kind()) {
    case FamilyKind::gaussian:
      exact = hermite_exact(i);
      break;
    case FamilyKind::gamma:
      exact = laguerre_exact(i, family.r() - 1);
      break;
    case FamilyKind::beta:
      exact = jacobi_exact(i, family.a() - 1, family.b() - 1);
      break;
  }
  Rational norm = expectation(exact * exact, ProductMeasure(family, 1));
  if constexpr (std::same_as<T, Rational>) {
    return BasisPolynomial<T>{family, i, std::move(exact), std::move(norm)};
  } else {
    return BasisPolynomial<T>{family, i, to_real(exact), to_double(norm)};
  }
}

template std::vector<Rational> raw_moments<Rational>(const MeasureFamily&, unsigned);
template std::vector<double> raw_moments<double>(const MeasureFamily&, unsigned);
template Rational raw_moment<Rational>(const MeasureFamily&, unsigned);
template double raw_moment<double>(const MeasureFamily&, unsigned);
template Rational expectation<Rational>(const Polynomial<Rational>&, const ProductMeasure&);
template double expectation<double>(const Polynomial<double>&, const ProductMeasure&);
template Rational variance<Rational>(const Polynomial<Rational>&, const ProductMeasure&);
template double variance<double>(const Polynomial<double>&, const ProductMeasure&);
template BasisPolynomial<Rational> basis<Rational>(const MeasureFamily&, unsigned);
template BasisPolynomial<double> basis<double>(const MeasureFamily&, unsigned);

}  // namespace gamma_lab
