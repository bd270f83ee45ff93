#pragma once

// Diffusion generators of the three reference laws acting on polynomials:
//   Gaussian (Ornstein-Uhlenbeck)  L f = sum_i  f_ii - x_i f_i
//   Gamma(r)  (Laguerre)           L f = sum_i  x_i f_ii + (r - x_i) f_i
//   Beta(a,b) (Jacobi, on [-1,1])  L f = sum_i  (1 - x_i^2) f_ii + ((b - a) - (a + b) x_i) f_i
// with carre du champ Gamma(f,g) = sum_i c(x_i) f_i g_i, c = 1, x, 1 - x^2.

#include "gamma_lab/measures.hpp"
#include "gamma_lab/polynomial.hpp"

#include <optional>
#include <span>
#include <vector>

namespace gamma_lab {

/// Laguerre drift. `stated` uses (r - x), whose invariant law is Gamma(r);
/// `shifted` uses (r + 1 - x), whose invariant law is Gamma(r + 1).
enum class LaguerreDrift { stated, shifted };

class DiffusionOperator {
 public:
  DiffusionOperator(MeasureFamily family, std::size_t dimension, LaguerreDrift drift = LaguerreDrift::stated);

  const MeasureFamily& family() const noexcept { return family_; }
  std::size_t dimension() const noexcept { return dimension_; }
  LaguerreDrift drift() const noexcept { return drift_; }

  /// Product of the configured family; integrals (energies, variances) use it.
  ProductMeasure measure() const { return ProductMeasure(family_, dimension_); }

  /// Law whose orthogonal polynomials diagonalize the generator. Equals
  /// family() except for the literal Laguerre drift, where it is Gamma(r + 1).
  MeasureFamily eigen_family() const;

  /// Eigenvalue (as a positive number, L u = -lambda u) of the degree-i
  /// one-dimensional eigenfunction: i for Gaussian/Gamma, i(i + a + b - 1) for Beta.
  Rational eigenvalue(unsigned i) const;
  /// Sum over coordinates of eigenvalue(index[j]).
  Rational eigenvalue(std::span<const unsigned> index) const;

  /// Smallest nonzero eigenvalue: 1, 1, a + b.
  Rational spectral_gap() const { return eigenvalue(1U); }
  /// The gap stated in the literature for the Jacobi case (a + b - 1); not used in checks.
  std::optional<Rational> stated_spectral_gap() const;

 private:
  MeasureFamily family_;
  std::size_t dimension_;
  LaguerreDrift drift_;
};

/// L f.
template <Coefficient T>
Polynomial<T> apply_generator(const DiffusionOperator& op, const Polynomial<T>& f);

/// Gamma(f, g) from the closed form sum_i c(x_i) f_i g_i.
template <Coefficient T>
Polynomial<T> carre_du_champ(const DiffusionOperator& op, const Polynomial<T>& f, const Polynomial<T>& g);

template <Coefficient T>
Polynomial<T> carre_du_champ(const DiffusionOperator& op, const Polynomial<T>& f) {
  return carre_du_champ(op, f, f);
}

/// Gamma(f, g) from its definition (L(fg) - f Lg - g Lf) / 2.
template <Coefficient T>
Polynomial<T> carre_du_champ_definition(const DiffusionOperator& op, const Polynomial<T>& f, const Polynomial<T>& g);

/// Chain rule Gamma(phi(f), g) == phi'(f) Gamma(f, g), phi univariate.
/// Exact comparison for Rational, relative 1e-10 for double.
template <Coefficient T>
bool check_diffusion(const DiffusionOperator& op, const Polynomial<T>& phi, const Polynomial<T>& f,
                     const Polynomial<T>& g);

/// E(f, g) computed as -E[f Lg] and as E[Gamma(f, g)]. Throws ConventionError
/// when the two disagree (the generator is not symmetric for the measure).
template <Coefficient T>
T dirichlet_energy(const DiffusionOperator& op, const Polynomial<T>& f, const Polynomial<T>& g);

template <Coefficient T>
struct SpectralComponent {
  T lambda;
  Polynomial<T> projection;
};

/// f = sum of eigenfunction components, ascending in lambda.
template <Coefficient T>
struct SpectralDecomposition {
  MeasureFamily family;  // eigen family
  std::size_t dimension;
  std::vector<SpectralComponent<T>> components;

  Polynomial<T> sum() const;
  /// Component for lambda, or nullptr.
  const Polynomial<T>* find(const T& lambda) const;
};

struct SpectralLimits {
  unsigned max_degree = 8;
  std::size_t max_dimension = 12;
};

/// Expansion of f in the tensor eigenbasis (projections by the exact moment
/// engine), grouped by eigenvalue. Double mode merges eigenvalues within 1e-9 relative.
template <Coefficient T>
SpectralDecomposition<T> spectral_decompose(const DiffusionOperator& op, const Polynomial<T>& f,
                                            const SpectralLimits& limits = {});

template <Coefficient T>
struct PoincareReport {
  T variance;
  T energy;
  T lambda1;
  std::optional<T> lambda1_stated;
  bool holds;
};

/// Var(f) <= E(f) / lambda1 with lambda1 = op.spectral_gap().
template <Coefficient T>
PoincareReport<T> poincare_check(const DiffusionOperator& op, const Polynomial<T>& f);

/// lambda with L p = -lambda p, or nullopt if p is not an eigenfunction (or is zero).
template <Coefficient T>
std::optional<T> eigenvalue_of(const DiffusionOperator& op, const Polynomial<T>& p);

/// Gamma(p) == L(p^2)/2 + lambda p^2 for an eigenfunction p. Throws
/// PreconditionError if p is not an eigenfunction.
template <Coefficient T>
bool eigenspace_gamma_identity(const DiffusionOperator& op, const Polynomial<T>& p);

/// prod_j u_{index[j]}(x_j) for the generator's eigen family.
template <Coefficient T>
Polynomial<T> tensor_basis(const DiffusionOperator& op, std::span<const unsigned> index);

}  // namespace gamma_lab
