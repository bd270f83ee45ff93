#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gamma_lab/polynomial.hpp"

#include "../support/generators.hpp"

#include <cmath>

using namespace gamma_lab;
using namespace gamma_lab::testing;

namespace {

ExactPolynomial x(std::size_t m, std::uint32_t i) { return ExactPolynomial::variable(m, i); }
ExactPolynomial c(std::size_t m, long v) { return ExactPolynomial::constant(m, Rational(v)); }

}  // namespace

TEST_CASE("evaluate") {
  const std::vector<double> pt{2.0, 3.0};
  CHECK(to_real(x(2, 1) * x(2, 2)).evaluate(pt) == 6.0);
  CHECK(to_real(c(2, 1)).evaluate(pt) == 1.0);
  const ExactPolynomial p = x(1, 1) * x(1, 1) - x(1, 1) * Rational(3);
  CHECK(p.evaluate(std::vector<Rational>{Rational(2)}) == -2);
  CHECK_THROWS_AS(p.evaluate(std::vector<Rational>{Rational(1), Rational(2)}), DimensionError);
}

TEST_CASE("ring operations") {
  CHECK((x(1, 1) + c(1, 1)) * (x(1, 1) - c(1, 1)) == x(1, 1) * x(1, 1) - c(1, 1));
  const ExactPolynomial p = x(2, 1) * x(2, 2) + c(2, 3);
  CHECK((p + p * Rational(-1)).is_zero());
  CHECK((p + p * Rational(-1)).num_terms() == 0);
  const ExactPolynomial m = x(2, 1) * x(2, 2);
  CHECK(m * m == ExactPolynomial::term(2, Monomial({{1, 2}, {2, 2}}), Rational(1)));
  CHECK_THROWS_AS(x(1, 1) + x(2, 1), DimensionError);
  CHECK_THROWS_AS(x(1, 1) * x(2, 1), DimensionError);
}

TEST_CASE("partial derivatives") {
  const ExactPolynomial p = x(2, 1) * x(2, 1) * x(2, 2);
  CHECK(partial_derivative(p, 1) == x(2, 1) * x(2, 2) * Rational(2));
  CHECK(partial_derivative(x(2, 1), 2).is_zero());
  CHECK(partial_derivative(x(2, 1) * x(2, 2) + x(2, 1), 1) == x(2, 2) + c(2, 1));
  CHECK_THROWS_AS(partial_derivative(p, 0), DimensionError);
  CHECK_THROWS_AS(partial_derivative(p, 3), DimensionError);
}

TEST_CASE("degree and multilinearity") {
  const ExactPolynomial p = x(3, 1) * x(3, 2) * x(3, 3);
  CHECK(p.degree() == 3U);
  CHECK(p.is_multilinear());
  const ExactPolynomial q = x(1, 1) * x(1, 1);
  CHECK(q.degree() == 2U);
  CHECK_FALSE(q.is_multilinear());
  CHECK_FALSE(ExactPolynomial(2).degree().has_value());
  CHECK(c(2, 4).degree() == 0U);
}

TEST_CASE("monomial normalization") {
  const Monomial m({{2, 1}, {1, 2}, {2, 3}, {3, 0}});
  REQUIRE(m.factors().size() == 2);
  CHECK(m.exponent(1) == 2);
  CHECK(m.exponent(2) == 4);
  CHECK(m.exponent(3) == 0);
  CHECK(m.degree() == 6);
  CHECK_THROWS_AS(Monomial({{0, 1}}), DimensionError);
  ExactPolynomial p(2);
  CHECK_THROWS_AS(p.add_term(Monomial::variable(3), Rational(1)), DimensionError);
}

TEST_CASE("zero coefficients are pruned") {
  ExactPolynomial p(1);
  p.add_term(Monomial::variable(1), Rational(2));
  p.add_term(Monomial::variable(1), Rational(-2));
  CHECK(p.is_zero());
  RealPolynomial r(1);
  r.add_term(Monomial::variable(1), 1e-300);
  CHECK(r.num_terms() == 1);  // no epsilon pruning in double mode
  r.add_term(Monomial::variable(1), -1e-300);
  CHECK(r.is_zero());
}

TEST_CASE("property: distributivity exact") {
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const ExactPolynomial p = random_polynomial(rng, m, 3);
    const ExactPolynomial q = random_polynomial(rng, m, 3);
    const ExactPolynomial r = random_polynomial(rng, m, 3);
    CHECK((p + q) * r == p * r + q * r);
    CHECK(p * q == q * p);
  }
}

TEST_CASE("property: evaluation is multiplicative in double mode") {
  Rng rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const RealPolynomial p = to_real(random_polynomial(rng, m, 4));
    const RealPolynomial q = to_real(random_polynomial(rng, m, 4));
    std::vector<double> pt(m);
    for (double& v : pt) v = u(rng);
    const double lhs = (p * q).evaluate(pt);
    const double rhs = p.evaluate(pt) * q.evaluate(pt);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("property: mixed partials commute") {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    const ExactPolynomial p = random_polynomial(rng, m, 5, 6);
    const auto a = static_cast<std::uint32_t>(uniform_int(rng, 1, static_cast<int>(m)));
    const auto b = static_cast<std::uint32_t>(uniform_int(rng, 1, static_cast<int>(m)));
    CHECK(partial_derivative(partial_derivative(p, a), b) == partial_derivative(partial_derivative(p, b), a));
  }
}

TEST_CASE("property: disjoint multilinear products stay multilinear") {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const ExactPolynomial p = random_multilinear(rng, 3, 3);
    ExactPolynomial q(6);
    const ExactPolynomial base = random_multilinear(rng, 3, 3);
    for (const auto& [mono, coef] : base.terms()) {
      std::vector<Monomial::Factor> shifted;
      for (const auto& [v, e] : mono.factors()) shifted.emplace_back(v + 3, e);
      q.add_term(Monomial(shifted), coef);
    }
    const ExactPolynomial prod = with_dimension(p, 6) * q;
    CHECK(prod.is_multilinear());
    CHECK_FALSE((prod * with_dimension(p, 6)).is_multilinear());
  }
}

TEST_CASE("composition and powers") {
  // phi(t) = t^2 + 1 composed with x1 + x2.
  ExactPolynomial phi(1);
  phi.add_term(Monomial::variable(1, 2), Rational(1));
  phi.add_term(Monomial{}, Rational(1));
  const ExactPolynomial f = x(2, 1) + x(2, 2);
  CHECK(compose(phi, f) == f * f + c(2, 1));
  CHECK(pow(f, 3) == f * f * f);
  CHECK(pow(f, 0) == c(2, 1));
  CHECK_THROWS_AS(compose(f, f), DimensionError);
  CHECK(embed_univariate(phi, 2, 3) == x(3, 2) * x(3, 2) + c(3, 1));
}

TEST_CASE("json round trip is lossless in rational mode") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const ExactPolynomial p = random_polynomial(rng, static_cast<std::size_t>(uniform_int(rng, 1, 5)), 4, 6);
    const ExactPolynomial back = polynomial_from_json<Rational>(nlohmann::json::parse(to_json(p).dump()));
    CHECK(back == p);
    CHECK(back.dimension() == p.dimension());
  }
  const auto j = nlohmann::json::parse(R"({"dim":2,"terms":[{"coef":"0.1","exps":[[1,1]]},{"coef":"-7/3","exps":[]}]})");
  const ExactPolynomial p = polynomial_from_json<Rational>(j);
  CHECK(p.coefficient(Monomial::variable(1)) == Rational(1, 10));
  CHECK(p.constant_term() == Rational(-7, 3));
}

TEST_CASE("json rejects malformed polynomials") {
  using nlohmann::json;
  CHECK_THROWS_AS(polynomial_from_json<Rational>(json::parse(R"({"terms":[]})")), ConfigError);
  CHECK_THROWS_AS(polynomial_from_json<Rational>(json::parse(R"({"dim":0,"terms":[]})")), ConfigError);
  CHECK_THROWS_AS(polynomial_from_json<Rational>(json::parse(R"({"dim":1,"terms":[{"coef":1,"exps":[[2,1]]}]})")),
                  ConfigError);
  CHECK_THROWS_AS(polynomial_from_json<Rational>(json::parse(R"({"dim":1,"terms":[{"coef":"x","exps":[]}]})")),
                  ConfigError);
  CHECK_THROWS_AS(polynomial_from_json<Rational>(json::parse(R"({"dim":1,"terms":[{"coef":1}]})")), ConfigError);
  CHECK_THROWS_AS(polynomial_from_json<Rational>(json::parse(R"({"dim":1,"terms":[],"extra":1})")), ConfigError);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("7/12") == Rational(7, 12));
  CHECK(parse_rational("-2.5") == Rational(-5, 2));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("-0.125e2") == Rational(-25, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK(rational_from_shortest(0.1) == Rational(1, 10));
  Rational q(6, 4);
  q.canonicalize();
  CHECK(to_string(q) == "3/2");
}

TEST_CASE("hash distinguishes polynomials") {
  const RealPolynomial a = to_real(x(2, 1) + x(2, 2));
  const RealPolynomial b = to_real(x(2, 1) - x(2, 2));
  CHECK(polynomial_hash(a) == polynomial_hash(to_real(x(2, 2) + x(2, 1))));
  CHECK(polynomial_hash(a) != polynomial_hash(b));
}
