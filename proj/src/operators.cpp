#include "gamma_lab/operators.hpp"

#include <cmath>
#include <map>

namespace gamma_lab {

namespace {

template <Coefficient T>
bool same_polynomial(const Polynomial<T>& a, const Polynomial<T>& b) {
  if constexpr (std::same_as<T, Rational>) {
    return a == b;
  } else {
    return approx_equal(a, b, 1e-10);
  }
}

template <Coefficient T>
bool same_value(const T& a, const T& b, double rel_tol) {
  if constexpr (std::same_as<T, Rational>) {
    return a == b;
  } else {
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
  }
}

// Drift constant of the Laguerre generator.
Rational laguerre_shift(const DiffusionOperator& op) {
  return op.drift() == LaguerreDrift::shifted ? op.family().r() + 1 : op.family().r();
}

// c(x_var) multiplying f_i g_i in the carre du champ.
template <Coefficient T>
Polynomial<T> gamma_weight(const DiffusionOperator& op, std::uint32_t var) {
  const std::size_t m = op.dimension();
  switch (op.family().kind()) {
    case FamilyKind::gaussian:
      return Polynomial<T>::constant(m, T(1));
    case FamilyKind::gamma:
      return Polynomial<T>::variable(m, var);
    case FamilyKind::beta: {
      Polynomial<T> w = Polynomial<T>::constant(m, T(1));
      w.add_term(Monomial::variable(var, 2), T(-1));
      return w;
    }
  }
  return Polynomial<T>(m);
}

inline Rational to_exact_coef(const Rational& c) { return c; }
inline Rational to_exact_coef(double c) { return Rational(c); }  // exact binary value

void require_dimension(const DiffusionOperator& op, std::size_t dim, const char* what) {
  if (dim != op.dimension()) {
    throw DimensionError(std::string(what) + ": polynomial dimension " + std::to_string(dim) +
                         " differs from operator dimension " + std::to_string(op.dimension()));
  }
}

}  // namespace

DiffusionOperator::DiffusionOperator(MeasureFamily family, std::size_t dimension, LaguerreDrift drift)
    : family_(std::move(family)), dimension_(dimension), drift_(drift) {
  if (dimension == 0) throw DimensionError("operator dimension must be positive");
}

MeasureFamily DiffusionOperator::eigen_family() const {
  if (family_.kind() == FamilyKind::gamma && drift_ == LaguerreDrift::shifted) {
    return MeasureFamily::gamma(family_.r() + 1);
  }
  return family_;
}

Rational DiffusionOperator::eigenvalue(unsigned i) const {
  if (family_.kind() == FamilyKind::beta) {
    return Rational(i) * (Rational(i) + family_.a() + family_.b() - 1);
  }
  return Rational(i);
}

Rational DiffusionOperator::eigenvalue(std::span<const unsigned> index) const {
  Rational total(0);
  for (unsigned i : index) total += eigenvalue(i);
  return total;
}

std::optional<Rational> DiffusionOperator::stated_spectral_gap() const {
  if (family_.kind() == FamilyKind::beta) return Rational(family_.a() + family_.b() - 1);
  return std::nullopt;
}

template <Coefficient T>
Polynomial<T> apply_generator(const DiffusionOperator& op, const Polynomial<T>& f) {
  require_dimension(op, f.dimension(), "apply_generator");
  Polynomial<T> out(f.dimension());
  const FamilyKind kind = op.family().kind();
  T shift(0), a(0), b(0);
  if (kind == FamilyKind::gamma) shift = from_rational<T>(laguerre_shift(op));
  if (kind == FamilyKind::beta) {
    a = from_rational<T>(op.family().a());
    b = from_rational<T>(op.family().b());
  }
  for (const auto& [m, c] : f.terms()) {
    for (const auto& [var, e] : m.factors()) {
      const T ce = c * T(static_cast<long>(e));
      const T second = ce * T(static_cast<long>(e - 1));  // c e (e-1)
      switch (kind) {
        case FamilyKind::gaussian:
          if (e >= 2) out.add_term(m.with_exponent(var, e - 2), second);
          out.add_term(m, T(-ce));
          break;
        case FamilyKind::gamma:
          out.add_term(m.with_exponent(var, e - 1), T(second + shift * ce));
          out.add_term(m, T(-ce));
          break;
        case FamilyKind::beta:
          if (e >= 2) out.add_term(m.with_exponent(var, e - 2), second);
          out.add_term(m.with_exponent(var, e - 1), T((b - a) * ce));
          out.add_term(m, T(-second - (a + b) * ce));
          break;
      }
    }
  }
  return out;
}

template <Coefficient T>
Polynomial<T> carre_du_champ(const DiffusionOperator& op, const Polynomial<T>& f, const Polynomial<T>& g) {
  require_dimension(op, f.dimension(), "carre_du_champ");
  require_dimension(op, g.dimension(), "carre_du_champ");
  std::map<std::uint32_t, bool> vars_f;
  for (const auto& [m, c] : f.terms()) {
    for (const auto& fac : m.factors()) vars_f[fac.first] = true;
  }
  std::map<std::uint32_t, bool> shared;
  for (const auto& [m, c] : g.terms()) {
    for (const auto& fac : m.factors()) {
      if (vars_f.count(fac.first)) shared[fac.first] = true;
    }
  }
  Polynomial<T> out(f.dimension());
  for (const auto& [var, unused] : shared) {
    Polynomial<T> df = partial_derivative(f, var);
    Polynomial<T> dg = &f == &g ? df : partial_derivative(g, var);
    out += gamma_weight<T>(op, var) * (df * dg);
  }
  return out;
}

template <Coefficient T>
Polynomial<T> carre_du_champ_definition(const DiffusionOperator& op, const Polynomial<T>& f, const Polynomial<T>& g) {
  Polynomial<T> out = apply_generator(op, f * g) - f * apply_generator(op, g) - g * apply_generator(op, f);
  out *= from_rational<T>(Rational(1, 2));
  return out;
}

template <Coefficient T>
bool check_diffusion(const DiffusionOperator& op, const Polynomial<T>& phi, const Polynomial<T>& f,
                     const Polynomial<T>& g) {
  const Polynomial<T> lhs = carre_du_champ(op, compose(phi, f), g);
  const Polynomial<T> rhs = compose(partial_derivative(phi, 1), f) * carre_du_champ(op, f, g);
  return same_polynomial(lhs, rhs);
}

template <Coefficient T>
T dirichlet_energy(const DiffusionOperator& op, const Polynomial<T>& f, const Polynomial<T>& g) {
  const ProductMeasure mu = op.measure();
  const T by_generator = -expectation(f * apply_generator(op, g), mu);
  const T by_gamma = expectation(carre_du_champ(op, f, g), mu);
  if (!same_value(by_generator, by_gamma, 1e-9)) {
    throw ConventionError("Dirichlet energy routes disagree for " + op.family().name() + ": -E[f Lg] = " +
                          format_double(to_double(by_generator)) +
                          ", E[Gamma(f,g)] = " + format_double(to_double(by_gamma)) +
                          " (generator is not symmetric for this measure)");
  }
  return by_gamma;
}

template <Coefficient T>
Polynomial<T> SpectralDecomposition<T>::sum() const {
  Polynomial<T> out(dimension);
  for (const auto& c : components) out += c.projection;
  return out;
}

template <Coefficient T>
const Polynomial<T>* SpectralDecomposition<T>::find(const T& lambda) const {
  for (const auto& c : components) {
    if (same_value(c.lambda, lambda, 1e-9)) return &c.projection;
  }
  return nullptr;
}

template <Coefficient T>
Polynomial<T> tensor_basis(const DiffusionOperator& op, std::span<const unsigned> index) {
  if (index.size() > op.dimension()) throw DimensionError("tensor index longer than operator dimension");
  const MeasureFamily fam = op.eigen_family();
  Polynomial<T> out = Polynomial<T>::constant(op.dimension(), T(1));
  for (std::size_t j = 0; j < index.size(); ++j) {
    if (index[j] == 0) continue;
    out = out * embed_univariate(basis<T>(fam, index[j]).polynomial, static_cast<std::uint32_t>(j + 1),
                                 op.dimension());
  }
  return out;
}

template <Coefficient T>
SpectralDecomposition<T> spectral_decompose(const DiffusionOperator& op, const Polynomial<T>& f,
                                            const SpectralLimits& limits) {
  require_dimension(op, f.dimension(), "spectral_decompose");
  const unsigned deg = f.degree().value_or(0);
  if (deg > limits.max_degree) {
    throw PreconditionError("spectral_decompose: degree " + std::to_string(deg) + " exceeds limit " +
                            std::to_string(limits.max_degree));
  }
  if (f.dimension() > limits.max_dimension) {
    throw PreconditionError("spectral_decompose: dimension " + std::to_string(f.dimension()) + " exceeds limit " +
                            std::to_string(limits.max_dimension));
  }
  const MeasureFamily fam = op.eigen_family();
  const ProductMeasure mu1(fam, 1);

  // x^k = sum_{j<=k} coef[k][j] u_j(x), coef[k][j] = E[x^k u_j] / E[u_j^2].
  std::vector<BasisPolynomial<Rational>> us;
  for (unsigned j = 0; j <= deg; ++j) us.push_back(basis<Rational>(fam, j));
  std::vector<std::vector<Rational>> coef(deg + 1);
  for (unsigned k = 0; k <= deg; ++k) {
    const ExactPolynomial xk = ExactPolynomial::term(1, Monomial::variable(1, k), Rational(1));
    for (unsigned j = 0; j <= k; ++j) {
      coef[k].push_back(expectation(xk * us[j].polynomial, mu1) / us[j].norm_squared);
    }
  }

  // Tensor coefficients keyed by a Monomial whose exponents are basis indices.
  std::map<Monomial, Rational> tensor;
  for (const auto& [m, c] : f.terms()) {
    std::map<Monomial, Rational> partial{{Monomial{}, to_exact_coef(c)}};
    for (const auto& [var, k] : m.factors()) {
      std::map<Monomial, Rational> next;
      for (const auto& [key, v] : partial) {
        for (unsigned j = 0; j <= k; ++j) {
          if (sgn(coef[k][j]) == 0) continue;
          next[j == 0 ? key : key * Monomial::variable(var, j)] += v * coef[k][j];
        }
      }
      partial = std::move(next);
    }
    for (const auto& [key, v] : partial) tensor[key] += v;
  }

  std::map<Rational, Polynomial<T>> grouped;
  for (const auto& [key, v] : tensor) {
    if (sgn(v) == 0) continue;
    Rational lambda(0);
    Polynomial<T> term = Polynomial<T>::constant(f.dimension(), from_rational<T>(v));
    for (const auto& [var, j] : key.factors()) {
      lambda += op.eigenvalue(j);
      if constexpr (std::same_as<T, Rational>) {
        term = term * embed_univariate(us[j].polynomial, var, f.dimension());
      } else {
        term = term * embed_univariate(to_real(us[j].polynomial), var, f.dimension());
      }
    }
    auto [it, inserted] = grouped.try_emplace(lambda, Polynomial<T>(f.dimension()));
    it->second += term;
  }

  SpectralDecomposition<T> out{fam, f.dimension(), {}};
  for (auto& [lambda, poly] : grouped) {
    if (poly.is_zero()) continue;
    const T lam = from_rational<T>(lambda);
    if (!out.components.empty() && same_value(out.components.back().lambda, lam, 1e-9)) {
      out.components.back().projection += poly;
    } else {
      out.components.push_back({lam, std::move(poly)});
    }
  }
  return out;
}

template <Coefficient T>
PoincareReport<T> poincare_check(const DiffusionOperator& op, const Polynomial<T>& f) {
  const T var = variance(f, op.measure());
  const T energy = dirichlet_energy(op, f, f);
  const T gap = from_rational<T>(op.spectral_gap());
  std::optional<T> stated;
  if (auto s = op.stated_spectral_gap()) stated = from_rational<T>(*s);
  bool holds = false;
  if constexpr (std::same_as<T, Rational>) {
    holds = var * gap <= energy;
  } else {
    const double bound = energy / gap;
    holds = var <= bound + 1e-12 * std::max(1.0, std::abs(bound));
  }
  return PoincareReport<T>{var, energy, gap, stated, holds};
}

template <Coefficient T>
std::optional<T> eigenvalue_of(const DiffusionOperator& op, const Polynomial<T>& p) {
  if (p.is_zero()) return std::nullopt;
  const Polynomial<T> lp = apply_generator(op, p);
  const auto& [m, c] = *p.terms().rbegin();
  const T lambda = T(-lp.coefficient(m) / c);
  if (!same_polynomial(lp, T(-lambda) * p)) return std::nullopt;
  return lambda;
}

template <Coefficient T>
bool eigenspace_gamma_identity(const DiffusionOperator& op, const Polynomial<T>& p) {
  const auto lambda = eigenvalue_of(op, p);
  if (!lambda) throw PreconditionError("eigenspace_gamma_identity: input is not an eigenfunction of L");
  const Polynomial<T> p2 = p * p;
  Polynomial<T> rhs = apply_generator(op, p2);
  rhs *= from_rational<T>(Rational(1, 2));
  rhs += *lambda * p2;
  return same_polynomial(carre_du_champ(op, p), rhs);
}

#define GAMMA_LAB_INSTANTIATE(T)                                                                                   \
  template Polynomial<T> apply_generator<T>(const DiffusionOperator&, const Polynomial<T>&);                      \
  template Polynomial<T> carre_du_champ<T>(const DiffusionOperator&, const Polynomial<T>&, const Polynomial<T>&); \
  template Polynomial<T> carre_du_champ_definition<T>(const DiffusionOperator&, const Polynomial<T>&,            \
                                                      const Polynomial<T>&);                                       \
  template bool check_diffusion<T>(const DiffusionOperator&, const Polynomial<T>&, const Polynomial<T>&,          \
                                   const Polynomial<T>&);                                                          \
  template T dirichlet_energy<T>(const DiffusionOperator&, const Polynomial<T>&, const Polynomial<T>&);           \
  template struct SpectralDecomposition<T>;                                                                        \
  template Polynomial<T> tensor_basis<T>(const DiffusionOperator&, std::span<const unsigned>);                    \
  template SpectralDecomposition<T> spectral_decompose<T>(const DiffusionOperator&, const Polynomial<T>&,         \
                                                          const SpectralLimits&);                                  \
  template PoincareReport<T> poincare_check<T>(const DiffusionOperator&, const Polynomial<T>&);                   \
  template std::optional<T> eigenvalue_of<T>(const DiffusionOperator&, const Polynomial<T>&);                     \
  template bool eigenspace_gamma_identity<T>(const DiffusionOperator&, const Polynomial<T>&);

GAMMA_LAB_INSTANTIATE(Rational)
GAMMA_LAB_INSTANTIATE(double)

#undef GAMMA_LAB_INSTANTIATE

}  // namespace gamma_lab
