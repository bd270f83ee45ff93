#pragma once

// Right-hand side of the smoothing inequality
//   d_TV <= d_FM / alpha + 4 kappa eps^(1/(2d+1)) + 2 sqrt(2/pi) (alpha/eps) budget,
// its moment inputs, grid optimization over (alpha, eps), and the
// convergence-chain experiment on polynomial sequences.

#include "gamma_lab/anticoncentration.hpp"
#include "gamma_lab/distances.hpp"
#include "gamma_lab/operators.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gamma_lab {

struct MomentBudget {
  double e_gamma_gamma = 0.0;  // E[Gamma(Gamma(Q))], moment engine
  double e_abs_lq = 0.0;       // E|LQ|, Monte Carlo
  double e_abs_lq_se = 0.0;
  double var_q = 0.0;
  std::map<int, double> l_norms;  // p -> (E|Q|^p)^(1/p), p in {2, 4}

  double total() const { return e_gamma_gamma + e_abs_lq; }
};

/// E[a(X) b(X)] without expanding a*b (sum over term pairs).
double expectation_of_product(const RealPolynomial& a, const RealPolynomial& b, const ProductMeasure& mu);

/// Throws PreconditionError for a constant Q or degree above max_degree.
MomentBudget moment_budget(const DiffusionOperator& op, const RealPolynomial& q, std::size_t n, std::uint64_t seed,
                           unsigned threads = 1, unsigned max_degree = 8);

/// E[Q^4] / E[Q^2]^2 by the exact moment engine; Q multilinear with E[Q^2] > 0.
template <Coefficient T>
T hypercontractivity_ratio(const Polynomial<T>& q, const ProductMeasure& mu);

struct BoundPoint {
  double alpha;
  double eps;
  double rhs;
};

struct BoundReport {
  double d_fm_input = 0.0;
  double kappa = 0.0;
  unsigned d = 1;
  double budget_sup = 0.0;
  double alpha = 1.0;
  double eps = 1.0;
  double term_fm = 0.0;      // d_fm / alpha
  double term_smooth = 0.0;  // 4 kappa eps^(1/(2d+1))
  double term_budget = 0.0;  // 2 sqrt(2/pi) (alpha / eps) budget
  double rhs_total = 0.0;
  std::size_t evaluated = 0;
  std::vector<BoundPoint> trace;  // best point per alpha row (optimizer only)
};

/// Throws PreconditionError unless alpha in (0, 1], eps > 0, d >= 1 and the
/// other inputs are finite and nonnegative.
BoundReport evaluate_bound(double d_fm, double kappa, unsigned d, double budget_sup, double alpha, double eps);

struct BoundGrid {
  double alpha_lo = 1e-6;
  double alpha_hi = 1.0;
  std::size_t alpha_points = 50;
  double eps_lo = 1e-8;
  double eps_hi = 1.0;
  std::size_t eps_points = 50;
};

/// Exhaustive search over the logarithmic (alpha, eps) grid; ties go to the
/// smallest alpha, then the smallest eps.
BoundReport optimize_bound(double d_fm, double kappa, unsigned d, double budget_sup, const BoundGrid& grid = {});

// ---- polynomial sequences ----

enum class SequenceKind {
  linear,       // sum_{i<=n} (x_i - m) / sqrt(n v): standardized sum
  chaos2,       // n^(-1/2) sum_{i<=n} y_{2i-1} y_{2i}, y standardized
  sample_mean,  // n^(-1) sum_{i<=n} x_i: converges to a constant
  fixed,        // Q_n = base for every n
  constant,     // Q_n = c
  custom        // explicit polynomial per n
};

std::string to_string(SequenceKind k);
SequenceKind parse_sequence_kind(const std::string& text);

struct SequenceSpec {
  SequenceKind kind = SequenceKind::linear;
  MeasureFamily family = MeasureFamily::gaussian();
  std::optional<RealPolynomial> base;           // fixed
  double constant_value = 0.0;                  // constant
  std::map<unsigned, RealPolynomial> elements;  // custom
};

RealPolynomial sequence_element(const SequenceSpec& spec, unsigned n);

/// Variance of the limit law: exact for the built-in kinds, the variance of
/// the largest-n element for custom sequences.
double limit_variance(const SequenceSpec& spec, std::span<const unsigned> n_grid);

struct ChainConfig {
  SequenceSpec sequence;
  std::vector<unsigned> n_grid;
  std::size_t samples = 1000000;
  unsigned replicates = 20;
  std::uint64_t seed = 0;
  std::size_t kappa_samples = 100000;
  std::size_t budget_samples = 1000000;
  std::vector<double> eps_grid = default_eps_grid();
  BoundGrid bound_grid;
  DistanceOptions distance;
};

struct ChainRow {
  unsigned n = 0;
  double d_fm = 0.0;      // median over replicates
  double d_tv_hat = 0.0;  // median over replicates
  double d_tv_se = 0.0;   // median pooled standard error
  double kappa = 0.0;
  double budget = 0.0;  // budget of this element
  double alpha_star = 0.0;
  double eps_star = 0.0;
  double bound = 0.0;  // optimized bound at the median d_fm, budget_sup
};

struct ChainReplicate {
  unsigned replicate = 0;
  unsigned n = 0;
  std::uint64_t seed = 0;
  double d_fm = 0.0;
  double d_tv_hat = 0.0;
  double d_tv_se = 0.0;
  double bound = 0.0;
  bool within = true;  // d_tv_hat <= bound + 3 se
};

struct ChainResult {
  std::vector<ChainRow> rows;
  std::vector<ChainReplicate> replicates;
  unsigned degree = 0;
  double budget_sup = 0.0;
  KappaFit kappa;
  std::size_t violations = 0;
};

/// Validates the sequence (ascending n grid, multilinear elements, positive
/// limit variance) and throws DegenerateLimitError for a degenerate limit.
void validate_chain(const ChainConfig& cfg);

/// Every replicate evaluates all n on one set of draws; the largest-n element
/// on those draws stands in for the limit. Replicate r uses
/// derive_seed(seed, "chain-replicate", r).
ChainResult tv_chain_experiment(const ChainConfig& cfg, unsigned threads = 1);

}  // namespace gamma_lab
