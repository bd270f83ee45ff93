#pragma once

// Kolmogorov, Fortet-Mourier (bounded-Lipschitz) and total-variation
// distances between one-dimensional laws given by samples or densities.

#include "gamma_lab/sampling.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gamma_lab {

enum class Metric { kol, fm, tv };
enum class Method { empirical, analytic, closed_form, histogram, grid_lp, w1_upper };

std::string to_string(Metric m);
std::string to_string(Method m);
/// "kol" | "fm" | "tv"; ConfigError otherwise.
Metric parse_metric(const std::string& text);

struct DistanceReport {
  Metric metric;
  double estimate = 0.0;
  Method method;
  double uncertainty = 0.0;  // standard error (histogram TV), 0 when exact
  std::vector<std::pair<std::string, double>> parameters;
};

/// Law with a density: uniform[lo,hi], (2/pi) cos^2(n x) on [0,pi],
/// Gaussian(mu, sigma), or a custom density on a bounded interval.
class AnalyticLaw {
 public:
  enum class Kind { uniform, cos2, gaussian, custom };

  static AnalyticLaw uniform(double lo = 0.0, double hi = 3.14159265358979323846);
  static AnalyticLaw cos2(unsigned n);
  static AnalyticLaw gaussian(double mu = 0.0, double sigma = 1.0);
  /// Throws PreconditionError unless the density integrates to 1 within 1e-9.
  static AnalyticLaw custom(std::function<double(double)> density, double lo, double hi, std::string name);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  unsigned cos2_n() const noexcept { return n_; }
  double param1() const noexcept { return p1_; }
  double param2() const noexcept { return p2_; }

  double density(double x) const;
  double cdf(double x) const;
  /// Interval outside which the law has mass below 1e-30.
  std::pair<double, double> effective_range() const;

 private:
  AnalyticLaw(Kind kind, double p1, double p2, unsigned n, std::string name)
      : kind_(kind), p1_(p1), p2_(p2), n_(n), name_(std::move(name)) {}

  Kind kind_;
  double p1_;
  double p2_;
  unsigned n_;
  std::string name_;
  std::function<double(double)> custom_;
};

/// Parses "uniform", "uniform:lo=0:hi=1", "cos2:n=5", "gaussian:mu=0:sigma=1".
AnalyticLaw parse_analytic_law(const std::string& text);

using Distribution = std::variant<SampleSet, AnalyticLaw>;

struct DistanceOptions {
  /// Histogram TV bin count; default ceil(n^(1/3)) with n the smaller sample size.
  std::optional<std::size_t> bins;
  std::size_t fm_grid = 2048;
  double fm_expand = 0.05;
  /// Use closed forms for known analytic pairs (cos2 vs uniform Kolmogorov).
  bool closed_forms = true;
};

// ---- Kolmogorov ----
DistanceReport kolmogorov(std::span<const double> x, std::span<const double> y);
DistanceReport kolmogorov(std::span<const double> x, const AnalyticLaw& g);
DistanceReport kolmogorov(const AnalyticLaw& f, const AnalyticLaw& g, const DistanceOptions& opt = {});

// ---- total variation ----
DistanceReport total_variation(std::span<const double> x, std::span<const double> y, const DistanceOptions& opt = {});
DistanceReport total_variation(std::span<const double> x, const AnalyticLaw& g, const DistanceOptions& opt = {});
/// (1/2) int |f - g| by Gauss-Kronrod quadrature, split at sign changes of f - g.
DistanceReport total_variation(const AnalyticLaw& f, const AnalyticLaw& g);

// ---- Fortet-Mourier ----
/// Exact optimum of sum_k h_k w_k over |h_k| <= 1, |h_{k+1} - h_k| <= spacing.
double fm_dual_on_grid(std::span<const double> weights, double spacing);

DistanceReport fortet_mourier(std::span<const double> x, std::span<const double> y, const DistanceOptions& opt = {});
DistanceReport fortet_mourier(std::span<const double> x, const AnalyticLaw& g, const DistanceOptions& opt = {});
DistanceReport fortet_mourier(const AnalyticLaw& f, const AnalyticLaw& g, const DistanceOptions& opt = {});
/// min(W1, 2) with W1 = int |F_x - F_y|.
DistanceReport fortet_mourier_upper(std::span<const double> x, std::span<const double> y);

/// Dispatch on sample/analytic inputs; symmetric in the argument order.
DistanceReport distance(Metric metric, const Distribution& left, const Distribution& right,
                        const DistanceOptions& opt = {});

}  // namespace gamma_lab
