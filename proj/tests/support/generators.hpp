#pragma once

// Hand-rolled random generators and independent oracles shared by the unit
// and acceptance tests.

#include "gamma_lab/measures.hpp"
#include "gamma_lab/operators.hpp"
#include "gamma_lab/polynomial.hpp"

#include <random>
#include <vector>

namespace gamma_lab::testing {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Small rational p/q, p in [-4, 4] \ {0}, q in {1, 2, 3}.
inline Rational random_coefficient(Rng& rng) {
  int p = 0;
  while (p == 0) p = uniform_int(rng, -4, 4);
  Rational q(p, uniform_int(rng, 1, 3));
  q.canonicalize();
  return q;
}

inline Monomial random_monomial(Rng& rng, std::size_t m, unsigned max_degree) {
  const unsigned deg = static_cast<unsigned>(uniform_int(rng, 0, static_cast<int>(max_degree)));
  std::vector<Monomial::Factor> factors;
  for (unsigned k = 0; k < deg; ++k) {
    factors.emplace_back(static_cast<std::uint32_t>(uniform_int(rng, 1, static_cast<int>(m))), 1);
  }
  return Monomial(factors);
}

inline ExactPolynomial random_polynomial(Rng& rng, std::size_t m, unsigned max_degree, int max_terms = 5) {
  ExactPolynomial p(m);
  const int terms = uniform_int(rng, 1, max_terms);
  for (int t = 0; t < terms; ++t) p.add_term(random_monomial(rng, m, max_degree), random_coefficient(rng));
  return p;
}

/// Non-constant variant (adds x_j when the draw came out constant).
inline ExactPolynomial random_nonconstant(Rng& rng, std::size_t m, unsigned max_degree, int max_terms = 5) {
  ExactPolynomial p = random_polynomial(rng, m, max_degree, max_terms);
  if (p.is_constant()) {
    p += ExactPolynomial::variable(m, static_cast<std::uint32_t>(uniform_int(rng, 1, static_cast<int>(m))));
  }
  return p;
}

inline ExactPolynomial random_multilinear(Rng& rng, std::size_t m, unsigned max_degree, int max_terms = 5) {
  ExactPolynomial p(m);
  const int terms = uniform_int(rng, 1, max_terms);
  for (int t = 0; t < terms; ++t) {
    std::vector<std::uint32_t> vars;
    for (std::uint32_t v = 1; v <= m; ++v) vars.push_back(v);
    std::shuffle(vars.begin(), vars.end(), rng);
    const int deg = uniform_int(rng, 1, static_cast<int>(std::min<std::size_t>(max_degree, m)));
    std::vector<Monomial::Factor> f;
    for (int k = 0; k < deg; ++k) f.emplace_back(vars[static_cast<std::size_t>(k)], 1);
    p.add_term(Monomial(f), random_coefficient(rng));
  }
  return p;
}

inline MeasureFamily random_family(Rng& rng) {
  static const Rational shapes[] = {Rational(1), Rational(3, 2), Rational(2), Rational(5, 2), Rational(3)};
  switch (uniform_int(rng, 0, 2)) {
    case 0:
      return MeasureFamily::gaussian();
    case 1:
      return MeasureFamily::gamma(shapes[uniform_int(rng, 0, 4)]);
    default:
      return MeasureFamily::beta(shapes[uniform_int(rng, 0, 4)], shapes[uniform_int(rng, 0, 4)]);
  }
}

inline std::vector<MeasureFamily> reference_families() {
  return {MeasureFamily::gaussian(), MeasureFamily::gamma(Rational(2)), MeasureFamily::gamma(Rational(5, 2)),
          MeasureFamily::beta(Rational(2), Rational(2)), MeasureFamily::beta(Rational(1), Rational(3, 2))};
}

// ---- oracles: generator and carre du champ from partial derivatives ----

/// c(x_i): 1, x_i, 1 - x_i^2.
inline ExactPolynomial oracle_weight(const MeasureFamily& fam, std::size_t m, std::uint32_t i) {
  const ExactPolynomial x = ExactPolynomial::variable(m, i);
  switch (fam.kind()) {
    case FamilyKind::gaussian:
      return ExactPolynomial::constant(m, Rational(1));
    case FamilyKind::gamma:
      return x;
    case FamilyKind::beta:
      return ExactPolynomial::constant(m, Rational(1)) - x * x;
  }
  return x;
}

/// Drift of coordinate i: -x, r - x, (b - a) - (a + b) x.
inline ExactPolynomial oracle_drift(const MeasureFamily& fam, std::size_t m, std::uint32_t i) {
  const ExactPolynomial x = ExactPolynomial::variable(m, i);
  switch (fam.kind()) {
    case FamilyKind::gaussian:
      return -x;
    case FamilyKind::gamma:
      return ExactPolynomial::constant(m, fam.r()) - x;
    case FamilyKind::beta:
      return ExactPolynomial::constant(m, fam.b() - fam.a()) - x * Rational(fam.a() + fam.b());
  }
  return x;
}

inline ExactPolynomial oracle_generator(const MeasureFamily& fam, const ExactPolynomial& f) {
  const std::size_t m = f.dimension();
  ExactPolynomial out(m);
  for (std::uint32_t i = 1; i <= m; ++i) {
    const ExactPolynomial fi = partial_derivative(f, i);
    out += oracle_weight(fam, m, i) * partial_derivative(fi, i) + oracle_drift(fam, m, i) * fi;
  }
  return out;
}

inline ExactPolynomial oracle_gamma(const MeasureFamily& fam, const ExactPolynomial& f, const ExactPolynomial& g) {
  const std::size_t m = f.dimension();
  ExactPolynomial out(m);
  for (std::uint32_t i = 1; i <= m; ++i) {
    out += oracle_weight(fam, m, i) * partial_derivative(f, i) * partial_derivative(g, i);
  }
  return out;
}

/// Eigenvalue of a tensor index computed from the spectrum formula.
inline Rational oracle_lambda(const MeasureFamily& fam, const std::vector<unsigned>& index) {
  Rational total(0);
  for (unsigned i : index) {
    if (fam.kind() == FamilyKind::beta) {
      total += Rational(i) * (Rational(i) + fam.a() + fam.b() - 1);
    } else {
      total += Rational(i);
    }
  }
  return total;
}

/// All index vectors of length m with total at most max_total.
inline std::vector<std::vector<unsigned>> indices_up_to(std::size_t m, unsigned max_total) {
  std::vector<std::vector<unsigned>> out;
  std::vector<unsigned> cur(m, 0);
  auto rec = [&](auto&& self, std::size_t pos, unsigned left) -> void {
    if (pos == m) {
      out.push_back(cur);
      return;
    }
    for (unsigned i = 0; i <= left; ++i) {
      cur[pos] = i;
      self(self, pos + 1, left - i);
    }
  };
  rec(rec, 0, max_total);
  return out;
}

}  // namespace gamma_lab::testing
