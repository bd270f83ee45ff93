#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gamma_lab/anticoncentration.hpp"

#include "../support/generators.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace gamma_lab;
using namespace gamma_lab::testing;

namespace {

RealPolynomial rx(std::size_t m, std::uint32_t i) { return RealPolynomial::variable(m, i); }

/// E[eps / (S + eps)] for S ~ chi-square with 2 degrees of freedom.
double chi2_smoothed(double eps) {
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([eps](double s) { return eps / (s + eps) * 0.5 * std::exp(-0.5 * s); }, 0.0,
                              std::numeric_limits<double>::infinity());
}

}  // namespace

TEST_CASE("small ball of a standard gaussian coordinate") {
  const ProductMeasure mu(MeasureFamily::gaussian(), 1);
  const std::vector<double> alphas{0.1, 1.0, 1e3};
  const SmallBallCurve c = small_ball(rx(1, 1), mu, alphas, 1000000, 41);
  const double want = std::erf(0.1 / std::numbers::sqrt2);
  CHECK(std::abs(c.probs[0] - want) <= 3.0 * c.standard_errors[0]);
  CHECK(std::abs(c.probs[1] - std::erf(1.0 / std::numbers::sqrt2)) <= 3.0 * c.standard_errors[1]);
  CHECK(c.probs[2] == 1.0);
  CHECK(c.degree == 1);
  CHECK(c.l2_norm == doctest::Approx(1.0));
  CHECK(c.n == 1000000);
}

TEST_CASE("property: small-ball curves are monotone in alpha") {
  Rng rng(42);
  const std::vector<double> alphas = log_grid(1e-4, 10.0, 30);
  for (int t = 0; t < 10; ++t) {
    const MeasureFamily fam = random_family(rng);
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    const RealPolynomial q = to_real(random_nonconstant(rng, m, 3, 4));
    const SmallBallCurve c = small_ball(q, ProductMeasure(fam, m), alphas, 20000, 100 + t);
    for (std::size_t i = 1; i < c.probs.size(); ++i) CHECK(c.probs[i] >= c.probs[i - 1]);
  }
}

TEST_CASE("small ball preconditions") {
  const ProductMeasure mu(MeasureFamily::gaussian(), 1);
  const std::vector<double> ok{0.1};
  CHECK_THROWS_AS(small_ball(RealPolynomial::constant(1, 2.0), mu, ok, 100, 1), PreconditionError);
  const std::vector<double> descending{1.0, 0.1};
  CHECK_THROWS_AS(small_ball(rx(1, 1), mu, descending, 100, 1), PreconditionError);
  const std::vector<double> nonpositive{0.0, 0.1};
  CHECK_THROWS_AS(small_ball(rx(1, 1), mu, nonpositive, 100, 1), PreconditionError);
  CHECK_THROWS_AS(small_ball(rx(1, 1), mu, std::vector<double>{}, 100, 1), PreconditionError);
  CHECK_THROWS_AS(carbery_wright_check(RealPolynomial(1), mu, ok, 100, 1), PreconditionError);
}

TEST_CASE("Carbery-Wright check on a constant") {
  const ProductMeasure mu(MeasureFamily::gaussian(), 1);
  const std::vector<double> alphas = log_grid(1e-3, 1.0, 7);
  const CWReport r = carbery_wright_check(RealPolynomial::constant(1, 5.0), mu, alphas, 10000, 2, 1, 0);
  CHECK(r.k == 1);
  for (double p : r.curve.probs) CHECK(p == 0.0);
  for (double x : r.ratios) CHECK(x == 0.0);
  CHECK(r.c_hat == 0.0);
  CHECK_FALSE(r.c_hat_check.has_value());
}

TEST_CASE("Carbery-Wright ratios for x1") {
  const ProductMeasure mu(MeasureFamily::gaussian(), 1);
  const std::vector<double> alphas = log_grid(1e-3, 1.0, 13);
  const CWReport r = carbery_wright_check(rx(1, 1), mu, alphas, 200000, 3, 1, 2);
  REQUIRE(r.ratios.size() == alphas.size());
  // P(|Z| <= a) / a -> sqrt(2/pi) as a -> 0.
  CHECK(std::abs(r.ratios.front() - std::sqrt(2.0 / std::numbers::pi)) <= 4.0 * r.ratio_errors.front());
  CHECK(r.c_hat == doctest::Approx(*std::max_element(r.ratios.begin(), r.ratios.end())));
  REQUIRE(r.c_hat_check.has_value());
  CHECK(r.stable);
}

TEST_CASE("log grid") {
  const auto g = log_grid(1e-3, 1.0, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[0] == 1e-3);
  CHECK(g[1] == doctest::Approx(1e-2));
  CHECK(g[3] == 1.0);
  CHECK(log_grid(0.5, 0.5, 1) == std::vector<double>{0.5});
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), PreconditionError);
  CHECK_THROWS_AS(log_grid(1.0, 0.5, 3), PreconditionError);
  const auto e = default_eps_grid();
  CHECK(e.size() == 25);
  CHECK(e.front() == 1e-6);
  CHECK(e.back() == 1.0);
}

TEST_CASE("smoothed functional of x1 x2 matches the chi-square integral") {
  // Gamma(x1 x2) = x1^2 + x2^2 under OU.
  const DiffusionOperator op(MeasureFamily::gaussian(), 2);
  const RealPolynomial q = rx(2, 1) * rx(2, 2);
  const std::vector<double> eps{1e-4, 0.01, 1.0};
  const auto est = smoothed_functional_curve(op, q, eps, 400000, 5);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double want = chi2_smoothed(eps[i]);
    INFO("eps=", eps[i], " est=", est[i].mean, " want=", want);
    CHECK(std::abs(est[i].mean - want) <= 3.0 * est[i].standard_error);
  }
  const MeanEstimate big = smoothed_indicator_functional(op, q, 1e6, 100000, 6);
  CHECK(big.mean == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(big.mean <= 1.0);
}

TEST_CASE("smoothed functional of a constant is one") {
  const DiffusionOperator op(MeasureFamily::gamma(Rational(2)), 1);
  const auto est = smoothed_functional_curve(op, RealPolynomial::constant(1, 3.0), default_eps_grid(), 1000, 7);
  for (const auto& e : est) CHECK(e.mean == 1.0);
}

TEST_CASE("property: smoothed functional is nondecreasing in eps") {
  Rng rng(43);
  const std::vector<double> eps = default_eps_grid();
  for (int t = 0; t < 10; ++t) {
    const MeasureFamily fam = random_family(rng);
    const std::size_t m = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    const RealPolynomial q = to_real(random_nonconstant(rng, m, 3, 4));
    const auto est = smoothed_functional_curve(DiffusionOperator(fam, m), q, eps, 20000, 200 + t);
    for (std::size_t i = 1; i < est.size(); ++i) CHECK(est[i].mean >= est[i - 1].mean);
    for (const auto& e : est) {
      CHECK(e.mean >= 0.0);
      CHECK(e.mean <= 1.0);
    }
  }
}

TEST_CASE("kappa fit") {
  const MeasureFamily g = MeasureFamily::gaussian();
  const std::vector<RealPolynomial> seq{rx(2, 1) * rx(2, 2)};
  const std::vector<RealPolynomial> doubled{rx(2, 1) * rx(2, 2) * 2.0};
  const std::vector<double> eps = default_eps_grid();
  const KappaFit a = kappa_fit(seq, g, 2, eps, 50000, 8);
  const KappaFit b = kappa_fit(doubled, g, 2, eps, 50000, 8);
  CHECK(b.kappa < a.kappa);
  CHECK(a.kappa_upper >= a.kappa);
  CHECK(a.d == 2);
  CHECK(a.kappa > 0.0);
  CHECK_THROWS_AS(kappa_fit(seq, g, 2, std::vector<double>{}, 100, 1), PreconditionError);
  CHECK_THROWS_AS(kappa_fit(seq, g, 1, eps, 100, 1), PreconditionError);
  CHECK_THROWS_AS(kappa_fit(seq, g, 0, eps, 100, 1), PreconditionError);
  CHECK_THROWS_AS(kappa_fit(std::vector<RealPolynomial>{}, g, 2, eps, 100, 1), PreconditionError);
  const std::vector<double> bad{1e-3, -1.0};
  CHECK_THROWS_AS(smoothed_functional_curve(DiffusionOperator(g, 2), seq[0], bad, 100, 1), PreconditionError);
}

TEST_CASE("kappa fit is deterministic and thread independent") {
  const std::vector<RealPolynomial> seq{rx(3, 1) * rx(3, 2) + rx(3, 3)};
  const std::vector<double> eps = log_grid(1e-4, 1.0, 9);
  const KappaFit a = kappa_fit(seq, MeasureFamily::beta(Rational(2), Rational(2)), 2, eps, 30000, 9, 1);
  const KappaFit b = kappa_fit(seq, MeasureFamily::beta(Rational(2), Rational(2)), 2, eps, 30000, 9, 4);
  CHECK(a.kappa == b.kappa);
  CHECK(a.kappa_upper == b.kappa_upper);
}
