#include "gamma_lab/distances.hpp"

#include "gamma_lab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace gamma_lab {

namespace {

constexpr double kPi = std::numbers::pi;

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
}

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::sort(out.begin(), out.end());
  return out;
}

void require_nonempty(std::span<const double> v, const char* what) {
  if (v.empty()) throw PreconditionError(std::string(what) + ": empty sample set");
}

std::pair<double, double> min_max(std::span<const double> v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}

std::size_t default_bins(std::size_t n) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n)) - 1e-9)));
}

struct Binning {
  double lo;
  double width;
  std::size_t bins;

  std::size_t index(double v) const {
    if (width <= 0.0) return 0;
    const double t = std::floor((v - lo) / width);
    if (t <= 0.0) return 0;
    return std::min(bins - 1, static_cast<std::size_t>(t));
  }
  double edge(std::size_t k) const { return k == bins ? lo + width * static_cast<double>(bins) : lo + width * static_cast<double>(k); }
};

std::vector<double> histogram(std::span<const double> v, const Binning& b) {
  std::vector<std::size_t> counts(b.bins, 0);
  for (double x : v) ++counts[b.index(x)];
  std::vector<double> p(b.bins);
  const double n = static_cast<double>(v.size());
  for (std::size_t k = 0; k < b.bins; ++k) p[k] = static_cast<double>(counts[k]) / n;
  return p;
}

// Variance of sum_k s_k p_hat_k for multinomial frequencies over n draws.
double signed_frequency_variance(const std::vector<double>& p, const std::vector<double>& s, std::size_t n) {
  double first = 0.0;
  double second = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    first += s[k] * p[k];
    second += s[k] * s[k] * p[k];
  }
  return std::max(0.0, second - first * first) / static_cast<double>(n);
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Masses of an analytic law on the grid: cell k collects (mid_{k-1}, mid_k].
std::vector<double> grid_masses(const AnalyticLaw& law, double lo, double spacing, std::size_t grid) {
  std::vector<double> w(grid);
  double prev = 0.0;
  for (std::size_t k = 0; k < grid; ++k) {
    const double upper = k + 1 == grid ? 1.0 : law.cdf(lo + spacing * (static_cast<double>(k) + 0.5));
    w[k] = upper - prev;
    prev = upper;
  }
  return w;
}

// Sample masses split linearly between the two neighboring grid points.
void add_interpolated(std::span<const double> x, double lo, double spacing, std::size_t grid, double sign,
                      std::vector<double>& w) {
  const double unit = sign / static_cast<double>(x.size());
  for (double v : x) {
    double t = (v - lo) / spacing;
    t = std::clamp(t, 0.0, static_cast<double>(grid - 1));
    std::size_t k = std::min(grid - 2, static_cast<std::size_t>(t));
    const double frac = t - static_cast<double>(k);
    w[k] += unit * (1.0 - frac);
    w[k + 1] += unit * frac;
  }
}

DistanceReport fm_report(const std::vector<double>& w, double lo, double spacing, std::size_t grid) {
  DistanceReport r{Metric::fm, std::clamp(fm_dual_on_grid(w, spacing), 0.0, 2.0), Method::grid_lp, 0.0, {}};
  r.parameters = {{"grid", static_cast<double>(grid)}, {"spacing", spacing}, {"lo", lo}};
  return r;
}

std::pair<double, double> fm_grid_range(double lo, double hi, double expand) {
  const double span = hi - lo;
  return {lo - expand * span, hi + expand * span};
}

}  // namespace

std::string to_string(Metric m) {
  switch (m) {
    case Metric::kol:
      return "kol";
    case Metric::fm:
      return "fm";
    case Metric::tv:
      return "tv";
  }
  return "?";
}

std::string to_string(Method m) {
  switch (m) {
    case Method::empirical:
      return "empirical";
    case Method::analytic:
      return "analytic";
    case Method::closed_form:
      return "closed-form";
    case Method::histogram:
      return "histogram";
    case Method::grid_lp:
      return "grid-lp";
    case Method::w1_upper:
      return "w1-upper";
  }
  return "?";
}

Metric parse_metric(const std::string& text) {
  if (text == "kol") return Metric::kol;
  if (text == "fm") return Metric::fm;
  if (text == "tv") return Metric::tv;
  throw ConfigError("unknown metric '" + text + "' (expected kol, fm or tv)");
}

// ---- AnalyticLaw ----

AnalyticLaw AnalyticLaw::uniform(double lo, double hi) {
  if (!(hi > lo)) throw PreconditionError("uniform law needs lo < hi");
  std::ostringstream name;
  name << "uniform[" << format_double(lo) << "," << format_double(hi) << "]";
  return AnalyticLaw(Kind::uniform, lo, hi, 0, name.str());
}

AnalyticLaw AnalyticLaw::cos2(unsigned n) {
  if (n == 0) throw PreconditionError("cos2 law needs n >= 1");
  return AnalyticLaw(Kind::cos2, 0.0, kPi, n, "cos2(n=" + std::to_string(n) + ")");
}

AnalyticLaw AnalyticLaw::gaussian(double mu, double sigma) {
  if (!(sigma > 0.0)) throw PreconditionError("gaussian law needs sigma > 0");
  return AnalyticLaw(Kind::gaussian, mu, sigma, 0, "gaussian(" + format_double(mu) + "," + format_double(sigma) + ")");
}

AnalyticLaw AnalyticLaw::custom(std::function<double(double)> density, double lo, double hi, std::string name) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw PreconditionError("custom law needs a bounded interval lo < hi");
  }
  AnalyticLaw law(Kind::custom, lo, hi, 0, std::move(name));
  law.custom_ = std::move(density);
  const double mass = integrate(law.custom_, lo, hi);
  if (std::abs(mass - 1.0) > 1e-9) {
    throw PreconditionError("custom density '" + law.name_ + "' integrates to " + format_double(mass));
  }
  return law;
}

double AnalyticLaw::density(double x) const {
  switch (kind_) {
    case Kind::uniform:
      return (x >= p1_ && x <= p2_) ? 1.0 / (p2_ - p1_) : 0.0;
    case Kind::cos2: {
      if (x < 0.0 || x > kPi) return 0.0;
      const double c = std::cos(static_cast<double>(n_) * x);
      return 2.0 / kPi * c * c;
    }
    case Kind::gaussian: {
      const double z = (x - p1_) / p2_;
      return std::exp(-0.5 * z * z) / (p2_ * std::sqrt(2.0 * kPi));
    }
    case Kind::custom:
      return (x >= p1_ && x <= p2_) ? custom_(x) : 0.0;
  }
  return 0.0;
}

double AnalyticLaw::cdf(double x) const {
  switch (kind_) {
    case Kind::uniform:
      return std::clamp((x - p1_) / (p2_ - p1_), 0.0, 1.0);
    case Kind::cos2: {
      if (x <= 0.0) return 0.0;
      if (x >= kPi) return 1.0;
      const double n = static_cast<double>(n_);
      return x / kPi + std::sin(2.0 * n * x) / (2.0 * kPi * n);
    }
    case Kind::gaussian:
      return 0.5 * boost::math::erfc(-(x - p1_) / (p2_ * std::numbers::sqrt2));
    case Kind::custom:
      if (x <= p1_) return 0.0;
      if (x >= p2_) return 1.0;
      return std::clamp(integrate(custom_, p1_, x), 0.0, 1.0);
  }
  return 0.0;
}

std::pair<double, double> AnalyticLaw::effective_range() const {
  if (kind_ == Kind::gaussian) return {p1_ - 12.0 * p2_, p1_ + 12.0 * p2_};
  return {p1_, p2_};
}

AnalyticLaw parse_analytic_law(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.empty()) throw ConfigError("empty analytic law");
  std::map<std::string, double> params;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ConfigError("analytic law parameter '" + parts[i] + "' lacks '='");
    try {
      params[parts[i].substr(0, eq)] = std::stod(parts[i].substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("analytic law parameter '" + parts[i] + "' is not numeric");
    }
  }
  auto take = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    double v = it->second;
    params.erase(it);
    return v;
  };
  std::optional<AnalyticLaw> law;
  if (parts[0] == "uniform") {
    const double lo = take("lo", 0.0);
    law = AnalyticLaw::uniform(lo, take("hi", kPi));
  } else if (parts[0] == "cos2") {
    const double n = take("n", 1.0);
    if (n < 1.0 || n != std::floor(n)) throw ConfigError("cos2 needs an integer n >= 1");
    law = AnalyticLaw::cos2(static_cast<unsigned>(n));
  } else if (parts[0] == "gaussian") {
    const double mu = take("mu", 0.0);
    law = AnalyticLaw::gaussian(mu, take("sigma", 1.0));
  } else {
    throw ConfigError("unknown analytic law '" + parts[0] + "'");
  }
  if (!params.empty()) throw ConfigError("unknown parameter '" + params.begin()->first + "' for " + parts[0]);
  return *law;
}

// ---- Kolmogorov ----

DistanceReport kolmogorov(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, "kolmogorov");
  require_nonempty(y, "kolmogorov");
  const std::vector<double> a = sorted_copy(x);
  const std::vector<double> b = sorted_copy(y);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double sup = 0.0;
  while (i < a.size() || j < b.size()) {
    double t;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      t = a[i];
    } else {
      t = b[j];
    }
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  DistanceReport r{Metric::kol, sup, Method::empirical, std::sqrt((na + nb) / (na * nb)), {}};
  r.parameters = {{"n_left", na}, {"n_right", nb}};
  return r;
}

DistanceReport kolmogorov(std::span<const double> x, const AnalyticLaw& g) {
  require_nonempty(x, "kolmogorov");
  const std::vector<double> a = sorted_copy(x);
  const double n = static_cast<double>(a.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size();) {
    std::size_t k = i;
    while (k < a.size() && a[k] == a[i]) ++k;
    const double F = g.cdf(a[i]);
    sup = std::max({sup, static_cast<double>(k) / n - F, F - static_cast<double>(i) / n});
    i = k;
  }
  DistanceReport r{Metric::kol, sup, Method::empirical, 1.0 / std::sqrt(n), {}};
  r.parameters = {{"n_left", n}};
  return r;
}

DistanceReport kolmogorov(const AnalyticLaw& f, const AnalyticLaw& g, const DistanceOptions& opt) {
  using K = AnalyticLaw::Kind;
  if (opt.closed_forms) {
    const AnalyticLaw* c = f.kind() == K::cos2 ? &f : (g.kind() == K::cos2 ? &g : nullptr);
    const AnalyticLaw* u = f.kind() == K::uniform ? &f : (g.kind() == K::uniform ? &g : nullptr);
    if (c != nullptr && u != nullptr && u->param1() == 0.0 && u->param2() == kPi) {
      // F_cos2 - F_unif = sin(2nx) / (2 pi n), whose sup is attained at x = pi / (4n).
      DistanceReport r{Metric::kol, 1.0 / (2.0 * kPi * c->cos2_n()), Method::closed_form, 0.0, {}};
      r.parameters = {{"n", static_cast<double>(c->cos2_n())}};
      return r;
    }
  }
  const auto [fl, fh] = f.effective_range();
  const auto [gl, gh] = g.effective_range();
  const double lo = std::min(fl, gl);
  const double hi = std::max(fh, gh);
  constexpr std::size_t kGrid = 8192;
  const double step = (hi - lo) / static_cast<double>(kGrid);
  auto gap = [&](double t) { return std::abs(f.cdf(t) - g.cdf(t)); };
  std::vector<double> vals(kGrid + 1);
  for (std::size_t k = 0; k <= kGrid; ++k) vals[k] = gap(lo + step * static_cast<double>(k));
  double sup = *std::max_element(vals.begin(), vals.end());
  for (std::size_t k = 1; k < kGrid; ++k) {
    if (vals[k] >= vals[k - 1] && vals[k] >= vals[k + 1] && vals[k] > 0.0) {
      const double a = lo + step * static_cast<double>(k - 1);
      const double b = lo + step * static_cast<double>(k + 1);
      auto res = boost::math::tools::brent_find_minima([&](double t) { return -gap(t); }, a, b, 52);
      sup = std::max(sup, -res.second);
    }
  }
  DistanceReport r{Metric::kol, sup, Method::analytic, 0.0, {}};
  r.parameters = {{"grid", static_cast<double>(kGrid)}};
  return r;
}

// ---- total variation ----

DistanceReport total_variation(std::span<const double> x, std::span<const double> y, const DistanceOptions& opt) {
  require_nonempty(x, "total_variation");
  require_nonempty(y, "total_variation");
  const auto [xl, xh] = min_max(x);
  const auto [yl, yh] = min_max(y);
  const double lo = std::min(xl, yl);
  const double hi = std::max(xh, yh);
  const std::size_t bins = opt.bins.value_or(default_bins(std::min(x.size(), y.size())));
  if (bins == 0) throw PreconditionError("total_variation: bin count must be positive");
  const Binning b{lo, (hi - lo) / static_cast<double>(bins), bins};
  const std::vector<double> p = histogram(x, b);
  const std::vector<double> q = histogram(y, b);
  double l1 = 0.0;
  std::vector<double> s(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    l1 += std::abs(p[k] - q[k]);
    s[k] = sign_of(p[k] - q[k]);
  }
  const double se = 0.5 * std::sqrt(signed_frequency_variance(p, s, x.size()) + signed_frequency_variance(q, s, y.size()));
  DistanceReport r{Metric::tv, 0.5 * l1, Method::histogram, se, {}};
  r.parameters = {{"bins", static_cast<double>(bins)}, {"lo", lo}, {"hi", hi}};
  return r;
}

DistanceReport total_variation(std::span<const double> x, const AnalyticLaw& g, const DistanceOptions& opt) {
  require_nonempty(x, "total_variation");
  const auto [lo, hi] = min_max(x);
  const std::size_t bins = opt.bins.value_or(default_bins(x.size()));
  if (bins == 0) throw PreconditionError("total_variation: bin count must be positive");
  const Binning b{lo, (hi - lo) / static_cast<double>(bins), bins};
  const std::vector<double> p = histogram(x, b);
  double l1 = 0.0;
  std::vector<double> s(bins);
  double prev = g.cdf(lo);
  const double outside = prev + (1.0 - g.cdf(hi));
  for (std::size_t k = 0; k < bins; ++k) {
    const double next = g.cdf(b.edge(k + 1));
    const double qk = next - prev;
    prev = next;
    l1 += std::abs(p[k] - qk);
    s[k] = sign_of(p[k] - qk);
  }
  l1 += outside;
  const double se = 0.5 * std::sqrt(signed_frequency_variance(p, s, x.size()));
  DistanceReport r{Metric::tv, std::min(1.0, 0.5 * l1), Method::histogram, se, {}};
  r.parameters = {{"bins", static_cast<double>(bins)}, {"lo", lo}, {"hi", hi}};
  return r;
}

DistanceReport total_variation(const AnalyticLaw& f, const AnalyticLaw& g) {
  const auto [fl, fh] = f.effective_range();
  const auto [gl, gh] = g.effective_range();
  const double lo = std::min(fl, gl);
  const double hi = std::max(fh, gh);
  auto diff = [&](double t) { return f.density(t) - g.density(t); };
  // Cut points: both supports, a uniform grid, and every sign change of f - g.
  constexpr std::size_t kCells = 4096;
  std::vector<double> cuts{fl, fh, gl, gh};
  const double step = (hi - lo) / static_cast<double>(kCells);
  double prev_x = lo;
  double prev_v = diff(lo);
  for (std::size_t k = 1; k <= kCells; ++k) {
    const double t = k == kCells ? hi : lo + step * static_cast<double>(k);
    const double v = diff(t);
    cuts.push_back(t);
    if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
      boost::uintmax_t iters = 200;
      auto root = boost::math::tools::toms748_solve(diff, prev_x, t, prev_v, v,
                                                    boost::math::tools::eps_tolerance<double>(50), iters);
      cuts.push_back(0.5 * (root.first + root.second));
    }
    prev_x = t;
    prev_v = v;
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  // |f - g| is smooth on every piece, so one 31-point rule per piece suffices.
  auto abs_diff = [&](double t) { return std::abs(diff(t)); };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (cuts[k] < lo || cuts[k + 1] > hi || !(cuts[k + 1] > cuts[k])) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(abs_diff, cuts[k], cuts[k + 1], 0);
  }
  DistanceReport r{Metric::tv, std::min(1.0, 0.5 * total), Method::analytic, 0.0, {}};
  r.parameters = {{"pieces", static_cast<double>(cuts.size() - 1)}};
  return r;
}

// ---- Fortet-Mourier ----

double fm_dual_on_grid(std::span<const double> weights, double spacing) {
  if (weights.empty()) return 0.0;
  // V_k(h) = max sum_{j<=k} h_j w_j with h_k = h, a concave piecewise-linear
  // function of h on [-1, 1] stored by its breakpoints.
  struct Point {
    double h;
    double v;
  };
  std::vector<Point> f{{-1.0, -weights[0]}, {1.0, weights[0]}};
  std::vector<Point> g;
  g.reserve(weights.size() * 2 + 4);
  auto value_at = [](const std::vector<Point>& pts, double h) {
    auto it = std::lower_bound(pts.begin(), pts.end(), h, [](const Point& p, double t) { return p.h < t; });
    if (it == pts.begin()) return it->v;
    if (it == pts.end()) return pts.back().v;
    const Point& b = *it;
    const Point& a = *(it - 1);
    if (b.h == a.h) return std::max(a.v, b.v);
    return a.v + (b.v - a.v) * (h - a.h) / (b.h - a.h);
  };
  for (std::size_t k = 1; k < weights.size(); ++k) {
    // Window max over [h - spacing, h + spacing].
    std::size_t top = 0;
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (f[i].v > f[top].v) top = i;
    }
    g.clear();
    for (std::size_t i = 0; i <= top; ++i) g.push_back({f[i].h - spacing, f[i].v});
    for (std::size_t i = top; i < f.size(); ++i) g.push_back({f[i].h + spacing, f[i].v});
    // Clip to [-1, 1].
    f.clear();
    f.push_back({-1.0, value_at(g, -1.0)});
    for (const Point& p : g) {
      if (p.h > -1.0 && p.h < 1.0 && p.h > f.back().h) f.push_back(p);
    }
    f.push_back({1.0, value_at(g, 1.0)});
    const double w = weights[k];
    for (Point& p : f) p.v += w * p.h;
  }
  double best = f.front().v;
  for (const Point& p : f) best = std::max(best, p.v);
  return best;
}

DistanceReport fortet_mourier(std::span<const double> x, std::span<const double> y, const DistanceOptions& opt) {
  require_nonempty(x, "fortet_mourier");
  require_nonempty(y, "fortet_mourier");
  const auto [xl, xh] = min_max(x);
  const auto [yl, yh] = min_max(y);
  const double lo0 = std::min(xl, yl);
  const double hi0 = std::max(xh, yh);
  if (lo0 == hi0) return DistanceReport{Metric::fm, 0.0, Method::grid_lp, 0.0, {{"grid", 1.0}}};
  const auto [lo, hi] = fm_grid_range(lo0, hi0, opt.fm_expand);
  const std::size_t grid = std::max<std::size_t>(2, opt.fm_grid);
  const double spacing = (hi - lo) / static_cast<double>(grid - 1);
  std::vector<double> w(grid, 0.0);
  add_interpolated(x, lo, spacing, grid, 1.0, w);
  add_interpolated(y, lo, spacing, grid, -1.0, w);
  return fm_report(w, lo, spacing, grid);
}

DistanceReport fortet_mourier(std::span<const double> x, const AnalyticLaw& g, const DistanceOptions& opt) {
  require_nonempty(x, "fortet_mourier");
  const auto [xl, xh] = min_max(x);
  const auto [gl, gh] = g.effective_range();
  const auto [lo, hi] = fm_grid_range(std::min(xl, gl), std::max(xh, gh), opt.fm_expand);
  const std::size_t grid = std::max<std::size_t>(2, opt.fm_grid);
  const double spacing = (hi - lo) / static_cast<double>(grid - 1);
  std::vector<double> w = grid_masses(g, lo, spacing, grid);
  for (double& v : w) v = -v;
  add_interpolated(x, lo, spacing, grid, 1.0, w);
  return fm_report(w, lo, spacing, grid);
}

DistanceReport fortet_mourier(const AnalyticLaw& f, const AnalyticLaw& g, const DistanceOptions& opt) {
  const auto [fl, fh] = f.effective_range();
  const auto [gl, gh] = g.effective_range();
  const auto [lo, hi] = fm_grid_range(std::min(fl, gl), std::max(fh, gh), opt.fm_expand);
  const std::size_t grid = std::max<std::size_t>(2, opt.fm_grid);
  const double spacing = (hi - lo) / static_cast<double>(grid - 1);
  std::vector<double> w = grid_masses(f, lo, spacing, grid);
  const std::vector<double> v = grid_masses(g, lo, spacing, grid);
  for (std::size_t k = 0; k < grid; ++k) w[k] -= v[k];
  return fm_report(w, lo, spacing, grid);
}

DistanceReport fortet_mourier_upper(std::span<const double> x, std::span<const double> y) {
  require_nonempty(x, "fortet_mourier_upper");
  require_nonempty(y, "fortet_mourier_upper");
  const std::vector<double> a = sorted_copy(x);
  const std::vector<double> b = sorted_copy(y);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double w1 = 0.0;
  double last = std::min(a.front(), b.front());
  while (i < a.size() || j < b.size()) {
    const double t = (j == b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    w1 += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (t - last);
    last = t;
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
  }
  DistanceReport r{Metric::fm, std::min(w1, 2.0), Method::w1_upper, 0.0, {}};
  r.parameters = {{"w1", w1}};
  return r;
}

// ---- dispatch ----

DistanceReport distance(Metric metric, const Distribution& left, const Distribution& right,
                        const DistanceOptions& opt) {
  const SampleSet* ls = std::get_if<SampleSet>(&left);
  const SampleSet* rs = std::get_if<SampleSet>(&right);
  const AnalyticLaw* la = std::get_if<AnalyticLaw>(&left);
  const AnalyticLaw* ra = std::get_if<AnalyticLaw>(&right);
  if (ls && rs) {
    switch (metric) {
      case Metric::kol:
        return kolmogorov(ls->values, rs->values);
      case Metric::tv:
        return total_variation(ls->values, rs->values, opt);
      case Metric::fm:
        return fortet_mourier(ls->values, rs->values, opt);
    }
  }
  if (la && ra) {
    switch (metric) {
      case Metric::kol:
        return kolmogorov(*la, *ra, opt);
      case Metric::tv:
        return total_variation(*la, *ra);
      case Metric::fm:
        return fortet_mourier(*la, *ra, opt);
    }
  }
  const SampleSet& s = ls ? *ls : *rs;
  const AnalyticLaw& a = la ? *la : *ra;
  switch (metric) {
    case Metric::kol:
      return kolmogorov(s.values, a);
    case Metric::tv:
      return total_variation(s.values, a, opt);
    case Metric::fm:
      return fortet_mourier(s.values, a, opt);
  }
  throw PreconditionError("unknown metric");
}

}  // namespace gamma_lab
