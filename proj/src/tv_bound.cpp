#include "gamma_lab/tv_bound.hpp"

#include "gamma_lab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace gamma_lab {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double hi = v[mid];
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

void require_finite_nonnegative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw PreconditionError(std::string(what) + " must be finite and nonnegative, got " + format_double(v));
  }
}

unsigned max_exponent(const RealPolynomial& p) {
  unsigned top = 0;
  for (const auto& [m, c] : p.terms()) {
    for (const auto& f : m.factors()) top = std::max<unsigned>(top, f.second);
  }
  return top;
}

}  // namespace

double expectation_of_product(const RealPolynomial& a, const RealPolynomial& b, const ProductMeasure& mu) {
  a.require_same_dimension(b);
  if (a.dimension() != mu.dimension) throw DimensionError("expectation_of_product: dimension mismatch");
  const std::vector<double> mom = raw_moments<double>(mu.family, max_exponent(a) + max_exponent(b));
  CompensatedSum total;
  for (const auto& [ma, ca] : a.terms()) {
    const auto& fa = ma.factors();
    for (const auto& [mb, cb] : b.terms()) {
      const auto& fb = mb.factors();
      double v = ca * cb;
      std::size_t i = 0;
      std::size_t j = 0;
      while ((i < fa.size() || j < fb.size()) && v != 0.0) {
        if (j == fb.size() || (i < fa.size() && fa[i].first < fb[j].first)) {
          v *= mom[fa[i++].second];
        } else if (i == fa.size() || fb[j].first < fa[i].first) {
          v *= mom[fb[j++].second];
        } else {
          v *= mom[fa[i].second + fb[j].second];
          ++i;
          ++j;
        }
      }
      if (v != 0.0) total.add(v);
    }
  }
  return total.value();
}

MomentBudget moment_budget(const DiffusionOperator& op, const RealPolynomial& q, std::size_t n, std::uint64_t seed,
                           unsigned threads, unsigned max_degree) {
  if (q.dimension() != op.dimension()) throw DimensionError("moment_budget: polynomial and operator dimensions differ");
  if (q.is_constant()) throw PreconditionError("moment_budget: degenerate (constant) functional");
  if (q.degree().value_or(0) > max_degree) {
    throw PreconditionError("moment_budget: degree exceeds the configured maximum " + std::to_string(max_degree));
  }
  const ProductMeasure mu = op.measure();
  MomentBudget b;
  const double mean = expectation(q, mu);
  const double second = expectation_of_product(q, q, mu);
  b.var_q = std::max(0.0, second - mean * mean);
  b.e_gamma_gamma = expectation(carre_du_champ(op, carre_du_champ(op, q)), mu);
  const RealPolynomial q2 = q * q;
  b.l_norms[2] = std::sqrt(second);
  b.l_norms[4] = std::pow(std::max(0.0, expectation_of_product(q2, q2, mu)), 0.25);

  const CompiledPolynomial lq(apply_generator(op, q));
  auto values = evaluate_on_shared_draws(std::span<const CompiledPolynomial>(&lq, 1), op.family(), n, seed, threads);
  for (double& v : values.front()) v = std::abs(v);
  const MeanEstimate est = mean_estimate(values.front());
  b.e_abs_lq = est.mean;
  b.e_abs_lq_se = est.standard_error;
  return b;
}

template <Coefficient T>
T hypercontractivity_ratio(const Polynomial<T>& q, const ProductMeasure& mu) {
  if (!q.is_multilinear()) throw PreconditionError("hypercontractivity_ratio: polynomial is not multilinear");
  const Polynomial<T> q2 = q * q;
  T e2 = expectation(q2, mu);
  if (!(e2 > T(0))) throw PreconditionError("hypercontractivity_ratio: E[Q^2] = 0 (degenerate polynomial)");
  T e4;
  if constexpr (std::same_as<T, Rational>) {
    e4 = expectation(q2 * q2, mu);
  } else {
    e4 = expectation_of_product(q2, q2, mu);
  }
  return T(e4 / (e2 * e2));
}

template Rational hypercontractivity_ratio<Rational>(const ExactPolynomial&, const ProductMeasure&);
template double hypercontractivity_ratio<double>(const RealPolynomial&, const ProductMeasure&);

BoundReport evaluate_bound(double d_fm, double kappa, unsigned d, double budget_sup, double alpha, double eps) {
  require_finite_nonnegative(d_fm, "d_fm");
  require_finite_nonnegative(kappa, "kappa");
  require_finite_nonnegative(budget_sup, "budget");
  if (d == 0) throw PreconditionError("degree bound d must be at least 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("alpha must lie in (0, 1], got " + format_double(alpha));
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("eps must be positive, got " + format_double(eps));
  BoundReport r;
  r.d_fm_input = d_fm;
  r.kappa = kappa;
  r.d = d;
  r.budget_sup = budget_sup;
  r.alpha = alpha;
  r.eps = eps;
  r.term_fm = d_fm / alpha;
  r.term_smooth = 4.0 * kappa * std::pow(eps, 1.0 / (2.0 * d + 1.0));
  r.term_budget = 2.0 * std::sqrt(2.0 / std::numbers::pi) * (alpha / eps) * budget_sup;
  r.rhs_total = r.term_fm + r.term_smooth + r.term_budget;
  r.evaluated = 1;
  return r;
}

BoundReport optimize_bound(double d_fm, double kappa, unsigned d, double budget_sup, const BoundGrid& grid) {
  const std::vector<double> alphas = log_grid(grid.alpha_lo, grid.alpha_hi, grid.alpha_points);
  const std::vector<double> epss = log_grid(grid.eps_lo, grid.eps_hi, grid.eps_points);
  if (grid.alpha_hi > 1.0) throw PreconditionError("alpha grid must stay within (0, 1]");
  std::optional<BoundReport> best;
  std::vector<BoundPoint> trace;
  for (double a : alphas) {
    std::optional<BoundReport> row;
    for (double e : epss) {
      BoundReport r = evaluate_bound(d_fm, kappa, d, budget_sup, a, e);
      if (!row || r.rhs_total < row->rhs_total) row = r;
    }
    trace.push_back({row->alpha, row->eps, row->rhs_total});
    if (!best || row->rhs_total < best->rhs_total) best = row;
  }
  best->evaluated = alphas.size() * epss.size();
  best->trace = std::move(trace);
  return *best;
}

// ---- sequences ----

std::string to_string(SequenceKind k) {
  switch (k) {
    case SequenceKind::linear:
      return "linear";
    case SequenceKind::chaos2:
      return "chaos2";
    case SequenceKind::sample_mean:
      return "sample_mean";
    case SequenceKind::fixed:
      return "fixed";
    case SequenceKind::constant:
      return "constant";
    case SequenceKind::custom:
      return "custom";
  }
  return "?";
}

SequenceKind parse_sequence_kind(const std::string& text) {
  for (SequenceKind k : {SequenceKind::linear, SequenceKind::chaos2, SequenceKind::sample_mean, SequenceKind::fixed,
                         SequenceKind::constant, SequenceKind::custom}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown sequence kind '" + text +
                    "' (expected linear, chaos2, sample_mean, fixed, constant or custom)");
}

RealPolynomial sequence_element(const SequenceSpec& spec, unsigned n) {
  if (n == 0) throw PreconditionError("sequence index n must be at least 1");
  const double mean = spec.family.mean();
  const double sd = std::sqrt(spec.family.variance());
  switch (spec.kind) {
    case SequenceKind::linear: {
      RealPolynomial q(n);
      const double scale = 1.0 / (sd * std::sqrt(static_cast<double>(n)));
      for (unsigned i = 1; i <= n; ++i) q.add_term(Monomial::variable(i), scale);
      q.add_term(Monomial{}, -mean * scale * static_cast<double>(n));
      return q;
    }
    case SequenceKind::chaos2: {
      RealPolynomial q(2 * static_cast<std::size_t>(n));
      const double scale = 1.0 / std::sqrt(static_cast<double>(n));
      for (unsigned i = 1; i <= n; ++i) {
        RealPolynomial y1(2 * static_cast<std::size_t>(n));
        y1.add_term(Monomial::variable(2 * i - 1), 1.0 / sd);
        y1.add_term(Monomial{}, -mean / sd);
        RealPolynomial y2(2 * static_cast<std::size_t>(n));
        y2.add_term(Monomial::variable(2 * i), 1.0 / sd);
        y2.add_term(Monomial{}, -mean / sd);
        q += (y1 * y2) * scale;
      }
      return q;
    }
    case SequenceKind::sample_mean: {
      RealPolynomial q(n);
      for (unsigned i = 1; i <= n; ++i) q.add_term(Monomial::variable(i), 1.0 / static_cast<double>(n));
      return q;
    }
    case SequenceKind::fixed:
      if (!spec.base) throw ConfigError("fixed sequence needs a base polynomial");
      return *spec.base;
    case SequenceKind::constant:
      return RealPolynomial::constant(1, spec.constant_value);
    case SequenceKind::custom: {
      auto it = spec.elements.find(n);
      if (it == spec.elements.end()) throw ConfigError("custom sequence has no element for n=" + std::to_string(n));
      return it->second;
    }
  }
  throw ConfigError("unknown sequence kind");
}

double limit_variance(const SequenceSpec& spec, std::span<const unsigned> n_grid) {
  switch (spec.kind) {
    case SequenceKind::linear:
    case SequenceKind::chaos2:
      return 1.0;
    case SequenceKind::sample_mean:
    case SequenceKind::constant:
      return 0.0;
    case SequenceKind::fixed:
    case SequenceKind::custom: {
      if (n_grid.empty()) throw PreconditionError("empty n grid");
      const RealPolynomial q = sequence_element(spec, n_grid.back());
      return variance(q, ProductMeasure(spec.family, q.dimension()));
    }
  }
  return 0.0;
}

void validate_chain(const ChainConfig& cfg) {
  if (cfg.n_grid.empty()) throw ConfigError("n_grid must not be empty");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] == 0) throw ConfigError("n_grid entries must be positive");
    if (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1]) throw ConfigError("n_grid must be strictly ascending");
  }
  if (cfg.samples < 2) throw ConfigError("samples must be at least 2");
  if (cfg.replicates == 0) throw ConfigError("replicates must be at least 1");
  if (cfg.kappa_samples < 2 || cfg.budget_samples < 2) throw ConfigError("kappa/budget sample counts must be >= 2");
  const double v = limit_variance(cfg.sequence, cfg.n_grid);
  if (!(v > 1e-12)) {
    throw DegenerateLimitError(
        "degenerate limit: the limit functional of the " + to_string(cfg.sequence.kind) +
        " sequence has zero variance, so by the variance criterion its law has no density and the sequence cannot "
        "converge in total variation");
  }
  for (unsigned n : cfg.n_grid) {
    const RealPolynomial q = sequence_element(cfg.sequence, n);
    if (!q.is_multilinear()) {
      throw PreconditionError("sequence element n=" + std::to_string(n) + " is not multilinear");
    }
  }
}

ChainResult tv_chain_experiment(const ChainConfig& cfg, unsigned threads) {
  validate_chain(cfg);
  const MeasureFamily& family = cfg.sequence.family;
  std::vector<RealPolynomial> polys;
  std::vector<CompiledPolynomial> compiled;
  ChainResult out;
  for (unsigned n : cfg.n_grid) {
    polys.push_back(sequence_element(cfg.sequence, n));
    compiled.emplace_back(polys.back());
    out.degree = std::max(out.degree, polys.back().degree().value_or(0));
  }
  const unsigned d = std::max(1U, out.degree);
  const std::size_t last = polys.size() - 1;

  // Kappa and budgets once per experiment.
  out.kappa = kappa_fit(polys, family, d, cfg.eps_grid, cfg.kappa_samples, derive_seed(cfg.seed, "chain-kappa"),
                        threads);
  std::vector<CompiledPolynomial> lq;
  std::vector<double> e_gg;
  for (const auto& q : polys) {
    const DiffusionOperator op(family, q.dimension());
    lq.emplace_back(apply_generator(op, q));
    e_gg.push_back(expectation(carre_du_champ(op, carre_du_champ(op, q)), op.measure()));
  }
  auto lq_values = evaluate_on_shared_draws(lq, family, cfg.budget_samples, derive_seed(cfg.seed, "chain-budget"),
                                            threads);
  std::vector<double> budgets;
  for (std::size_t i = 0; i < polys.size(); ++i) {
    for (double& v : lq_values[i]) v = std::abs(v);
    budgets.push_back(e_gg[i] + mean_estimate(lq_values[i]).mean);
  }
  lq_values.clear();
  out.budget_sup = *std::max_element(budgets.begin(), budgets.end());
  const double kappa = out.kappa.kappa_upper;

  std::vector<std::vector<double>> fm(polys.size()), tv(polys.size()), se(polys.size());
  for (unsigned r = 0; r < cfg.replicates; ++r) {
    const std::uint64_t seed_r = derive_seed(cfg.seed, "chain-replicate", r);
    const auto values = evaluate_on_shared_draws(compiled, family, cfg.samples, seed_r, threads);
    for (std::size_t i = 0; i < polys.size(); ++i) {
      const DistanceReport f = fortet_mourier(values[i], values[last], cfg.distance);
      const DistanceReport t = total_variation(values[i], values[last], cfg.distance);
      const BoundReport b = optimize_bound(f.estimate, kappa, d, out.budget_sup, cfg.bound_grid);
      ChainReplicate rep{r, cfg.n_grid[i], seed_r, f.estimate, t.estimate, t.uncertainty, b.rhs_total, true};
      rep.within = rep.d_tv_hat <= rep.bound + 3.0 * rep.d_tv_se;
      if (!rep.within) ++out.violations;
      out.replicates.push_back(rep);
      fm[i].push_back(f.estimate);
      tv[i].push_back(t.estimate);
      se[i].push_back(t.uncertainty);
    }
  }

  for (std::size_t i = 0; i < polys.size(); ++i) {
    ChainRow row;
    row.n = cfg.n_grid[i];
    row.d_fm = median(fm[i]);
    row.d_tv_hat = median(tv[i]);
    row.d_tv_se = median(se[i]);
    row.kappa = kappa;
    row.budget = budgets[i];
    const BoundReport b = optimize_bound(row.d_fm, kappa, d, out.budget_sup, cfg.bound_grid);
    row.alpha_star = b.alpha;
    row.eps_star = b.eps;
    row.bound = b.rhs_total;
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace gamma_lab
