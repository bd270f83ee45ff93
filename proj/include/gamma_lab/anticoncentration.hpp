#pragma once

// Small-ball probabilities, the Carbery-Wright ratio check, and the smoothed
// functional E[eps / (Gamma(Q) + eps)] with its power-law fit.

#include "gamma_lab/operators.hpp"
#include "gamma_lab/parallel.hpp"
#include "gamma_lab/sampling.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gamma_lab {

struct SmallBallCurve {
  std::vector<double> alphas;
  std::vector<double> probs;            // frequency of |value| <= alpha
  std::vector<double> standard_errors;  // binomial
  std::size_t n = 0;
  std::uint64_t seed = 0;
  unsigned degree = 0;
  double l2_norm = 0.0;  // (E[Q^2])^(1/2), moment engine
};

/// Frequencies of |v| <= alpha on one shared sample for every alpha (so the
/// curve is monotone). alphas must be positive and ascending.
SmallBallCurve small_ball_curve(std::span<const double> values, std::span<const double> alphas);

/// mu{|Q| <= alpha} by Monte Carlo; requires degree(Q) >= 1.
SmallBallCurve small_ball(const RealPolynomial& q, const ProductMeasure& mu, std::span<const double> alphas,
                          std::size_t n, std::uint64_t seed, unsigned threads = 1);

struct CWReport {
  SmallBallCurve curve;
  unsigned k = 1;                     // max(degree, 1)
  std::vector<double> ratios;         // prob * E[Q^2]^(1/2k) / alpha^(1/k)
  std::vector<double> ratio_errors;   // standard errors of the ratios
  double c_hat = 0.0;                 // max ratio / k
  std::optional<double> c_hat_check;  // same fit on stability_multiplier * n fresh draws
  double stability_factor = 1.0;      // max(c_hat, c_hat_check) / min(...)
  bool stable = true;                 // stability_factor < 2
};

/// Rejects E[Q^2] = 0. stability_multiplier = 0 skips the stability rerun.
CWReport carbery_wright_check(const RealPolynomial& q, const ProductMeasure& mu, std::span<const double> alphas,
                              std::size_t n, std::uint64_t seed, unsigned threads = 1,
                              unsigned stability_multiplier = 10);

/// Logarithmic grid of `points` values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t points);
/// 25 points from 1e-6 to 1.
std::vector<double> default_eps_grid();

/// E[eps / (Gamma(Q)(X) + eps)] for each eps on one shared sample.
std::vector<MeanEstimate> smoothed_functional_curve(const DiffusionOperator& op, const RealPolynomial& q,
                                                    std::span<const double> eps, std::size_t n, std::uint64_t seed,
                                                    unsigned threads = 1);

MeanEstimate smoothed_indicator_functional(const DiffusionOperator& op, const RealPolynomial& q, double eps,
                                           std::size_t n, std::uint64_t seed, unsigned threads = 1);

struct KappaFit {
  double kappa = 0.0;        // max over elements and eps of estimate / eps^(1/(2d+1))
  double kappa_upper = 0.0;  // same with estimate + 3 standard errors
  unsigned d = 1;
  double worst_eps = 0.0;
  std::size_t worst_element = 0;
};

/// Least kappa with functional <= kappa eps^(1/(2d+1)) over the grid and the
/// sequence elements. Element i is sampled with derive_seed(seed, "kappa", i).
KappaFit kappa_fit(std::span<const RealPolynomial> sequence, const MeasureFamily& family, unsigned d,
                   std::span<const double> eps, std::size_t n, std::uint64_t seed, unsigned threads = 1);

}  // namespace gamma_lab
