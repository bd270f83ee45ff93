#include "gamma_lab/anticoncentration.hpp"

#include "gamma_lab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gamma_lab {

namespace {

void require_alphas(std::span<const double> alphas) {
  if (alphas.empty()) throw PreconditionError("small-ball grid is empty");
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) throw PreconditionError("small-ball thresholds must be positive");
    if (i > 0 && !(alphas[i] > alphas[i - 1])) throw PreconditionError("small-ball thresholds must be ascending");
  }
}

void require_eps(std::span<const double> eps) {
  if (eps.empty()) throw PreconditionError("eps grid is empty");
  for (double e : eps) {
    if (!(e > 0.0)) throw PreconditionError("eps values must be positive");
  }
}

SmallBallCurve curve_for(const RealPolynomial& q, const ProductMeasure& mu, std::span<const double> alphas,
                         std::size_t n, std::uint64_t seed, unsigned threads) {
  const SampleSet s = functional_samples(q, mu, n, seed, threads);
  SmallBallCurve c = small_ball_curve(s.values, alphas);
  c.seed = seed;
  c.degree = q.degree().value_or(0);
  c.l2_norm = std::sqrt(std::max(0.0, expectation(q * q, mu)));
  return c;
}

double cw_fit(const SmallBallCurve& c, unsigned k, std::vector<double>* ratios, std::vector<double>* errors) {
  const double scale = std::pow(c.l2_norm * c.l2_norm, 1.0 / (2.0 * k));
  double best = 0.0;
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    const double denom = std::pow(c.alphas[i], 1.0 / k);
    const double r = c.probs[i] * scale / denom;
    if (ratios) ratios->push_back(r);
    if (errors) errors->push_back(c.standard_errors[i] * scale / denom);
    best = std::max(best, r);
  }
  return best / k;
}

std::vector<double> gamma_values(const DiffusionOperator& op, const RealPolynomial& q, std::size_t n,
                                 std::uint64_t seed, unsigned threads) {
  const RealPolynomial g = carre_du_champ(op, q);
  const CompiledPolynomial compiled(g);
  auto values =
      evaluate_on_shared_draws(std::span<const CompiledPolynomial>(&compiled, 1), op.family(), n, seed, threads);
  return std::move(values.front());
}

std::vector<MeanEstimate> smoothed_from_values(std::span<const double> gamma, std::span<const double> eps) {
  std::vector<MeanEstimate> out;
  out.reserve(eps.size());
  std::vector<double> terms(gamma.size());
  for (double e : eps) {
    for (std::size_t i = 0; i < gamma.size(); ++i) terms[i] = e / (gamma[i] + e);
    out.push_back(mean_estimate(terms));
  }
  return out;
}

}  // namespace

SmallBallCurve small_ball_curve(std::span<const double> values, std::span<const double> alphas) {
  require_alphas(alphas);
  if (values.empty()) throw PreconditionError("small-ball sample is empty");
  std::vector<double> mags(values.size());
  std::transform(values.begin(), values.end(), mags.begin(), [](double v) { return std::abs(v); });
  std::sort(mags.begin(), mags.end());
  SmallBallCurve c;
  c.n = values.size();
  const double n = static_cast<double>(values.size());
  for (double a : alphas) {
    const double p = static_cast<double>(std::upper_bound(mags.begin(), mags.end(), a) - mags.begin()) / n;
    c.alphas.push_back(a);
    c.probs.push_back(p);
    c.standard_errors.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  return c;
}

SmallBallCurve small_ball(const RealPolynomial& q, const ProductMeasure& mu, std::span<const double> alphas,
                          std::size_t n, std::uint64_t seed, unsigned threads) {
  if (q.degree().value_or(0) < 1) throw PreconditionError("small_ball needs a polynomial of degree >= 1");
  return curve_for(q, mu, alphas, n, seed, threads);
}

CWReport carbery_wright_check(const RealPolynomial& q, const ProductMeasure& mu, std::span<const double> alphas,
                              std::size_t n, std::uint64_t seed, unsigned threads, unsigned stability_multiplier) {
  require_alphas(alphas);
  if (!(expectation(q * q, mu) > 0.0)) {
    throw PreconditionError("carbery_wright_check: E[Q^2] = 0 (degenerate polynomial)");
  }
  CWReport r;
  r.k = std::max(1U, q.degree().value_or(0));
  r.curve = curve_for(q, mu, alphas, n, seed, threads);
  r.c_hat = cw_fit(r.curve, r.k, &r.ratios, &r.ratio_errors);
  if (stability_multiplier > 0) {
    const SmallBallCurve check =
        curve_for(q, mu, alphas, n * stability_multiplier, derive_seed(seed, "cw-stability"), threads);
    r.c_hat_check = cw_fit(check, r.k, nullptr, nullptr);
    const double hi = std::max(r.c_hat, *r.c_hat_check);
    const double lo = std::min(r.c_hat, *r.c_hat_check);
    r.stability_factor = hi == 0.0 ? 1.0 : (lo == 0.0 ? std::numeric_limits<double>::infinity() : hi / lo);
    r.stable = r.stability_factor < 2.0;
  }
  return r;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo) || points == 0) throw PreconditionError("log_grid needs 0 < lo <= hi and points >= 1");
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_eps_grid() { return log_grid(1e-6, 1.0, 25); }

std::vector<MeanEstimate> smoothed_functional_curve(const DiffusionOperator& op, const RealPolynomial& q,
                                                    std::span<const double> eps, std::size_t n, std::uint64_t seed,
                                                    unsigned threads) {
  require_eps(eps);
  const std::vector<double> g = gamma_values(op, q, n, seed, threads);
  return smoothed_from_values(g, eps);
}

MeanEstimate smoothed_indicator_functional(const DiffusionOperator& op, const RealPolynomial& q, double eps,
                                           std::size_t n, std::uint64_t seed, unsigned threads) {
  return smoothed_functional_curve(op, q, std::span<const double>(&eps, 1), n, seed, threads).front();
}

KappaFit kappa_fit(std::span<const RealPolynomial> sequence, const MeasureFamily& family, unsigned d,
                   std::span<const double> eps, std::size_t n, std::uint64_t seed, unsigned threads) {
  require_eps(eps);
  if (sequence.empty()) throw PreconditionError("kappa_fit: empty sequence");
  if (d == 0) throw PreconditionError("kappa_fit: degree bound must be at least 1");
  KappaFit fit;
  fit.d = d;
  const double power = 1.0 / (2.0 * d + 1.0);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (sequence[i].degree().value_or(0) > d) {
      throw PreconditionError("kappa_fit: sequence element exceeds the degree bound");
    }
    const DiffusionOperator op(family, sequence[i].dimension());
    const auto est = smoothed_from_values(gamma_values(op, sequence[i], n, derive_seed(seed, "kappa", i), threads), eps);
    for (std::size_t j = 0; j < eps.size(); ++j) {
      const double scale = std::pow(eps[j], power);
      const double k = est[j].mean / scale;
      if (k > fit.kappa) {
        fit.kappa = k;
        fit.worst_eps = eps[j];
        fit.worst_element = i;
      }
      fit.kappa_upper = std::max(fit.kappa_upper, (est[j].mean + 3.0 * est[j].standard_error) / scale);
    }
  }
  return fit;
}

}  // namespace gamma_lab
