#include "gamma_lab/polynomial.hpp"

#include "gamma_lab/rng.hpp"

#include <cmath>
#include <sstream>

namespace gamma_lab {

bool approx_equal(const RealPolynomial& a, const RealPolynomial& b, double rel_tol) {
  if (a.dimension() != b.dimension()) return false;
  double scale = 1.0;
  for (const auto& [m, c] : a.terms()) scale = std::max(scale, std::abs(c));
  for (const auto& [m, c] : b.terms()) scale = std::max(scale, std::abs(c));
  RealPolynomial diff = a - b;
  for (const auto& [m, c] : diff.terms()) {
    if (std::abs(c) > rel_tol * scale) return false;
  }
  return true;
}

namespace {

std::string coef_text(const Rational& c) { return to_string(c); }
std::string coef_text(double c) { return format_double(c); }

bool is_negative(const Rational& c) { return sgn(c) < 0; }
bool is_negative(double c) { return c < 0; }

std::string monomial_text(const Monomial& m) {
  std::string out;
  for (const auto& [var, exp] : m.factors()) {
    if (!out.empty()) out += "*";
    out += "x" + std::to_string(var);
    if (exp > 1) out += "^" + std::to_string(exp);
  }
  return out;
}

nlohmann::json exps_json(const Monomial& m) {
  nlohmann::json exps = nlohmann::json::array();
  for (const auto& [var, exp] : m.factors()) exps.push_back({var, exp});
  return exps;
}

nlohmann::json rational_json(const Rational& c) {
  if (c.get_den() == 1 && c.get_num().fits_slong_p()) {
    long v = c.get_num().get_si();
    if (v > -(1L << 53) && v < (1L << 53)) return v;
  }
  if (has_finite_decimal(c)) {
    // Emit as a JSON number only when reading it back recovers the same rational.
    double d = c.get_d();
    if (std::isfinite(d) && rational_from_shortest(d) == c) return d;
  }
  return to_string(c);
}

Monomial monomial_from_json(const nlohmann::json& exps) {
  if (!exps.is_array()) throw ConfigError("polynomial term 'exps' must be an array of [var, power] pairs");
  std::vector<Monomial::Factor> factors;
  for (const auto& pair : exps) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer() || !pair[1].is_number_integer()) {
      throw ConfigError("each entry of 'exps' must be [var, power] with integer entries");
    }
    long long var = pair[0].get<long long>();
    long long power = pair[1].get<long long>();
    if (var < 1) throw ConfigError("variable indices in 'exps' start at 1");
    if (power < 1) throw ConfigError("exponents in 'exps' must be positive");
    factors.emplace_back(static_cast<std::uint32_t>(var), static_cast<std::uint32_t>(power));
  }
  return Monomial(std::move(factors));
}

template <Coefficient T>
T coef_from_json(const nlohmann::json& c) {
  Rational q;
  if (c.is_number_integer()) {
    q = Rational(mpz_class(c.dump(), 10));
  } else if (c.is_number_float()) {
    if constexpr (std::same_as<T, double>) return c.get<double>();
    q = rational_from_shortest(c.get<double>());
  } else if (c.is_string()) {
    try {
      q = parse_rational(c.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("bad coefficient: ") + e.what());
    }
  } else {
    throw ConfigError("coefficient must be a number or a rational string");
  }
  return from_rational<T>(q);
}

}  // namespace

template <Coefficient T>
std::string to_display_string(const Polynomial<T>& p) {
  if (p.is_zero()) return "0";
  std::string out;
  // Highest degree first reads naturally.
  std::vector<std::pair<Monomial, T>> terms(p.terms().begin(), p.terms().end());
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& a, const auto& b) { return a.first.degree() > b.first.degree(); });
  for (const auto& [m, c] : terms) {
    bool neg = is_negative(c);
    T mag = neg ? T(-c) : c;
    std::string mag_text = coef_text(mag);
    std::string mono = monomial_text(m);
    std::string body;
    if (mono.empty()) {
      body = mag_text;
    } else if (mag_text == "1") {
      body = mono;
    } else {
      body = mag_text + "*" + mono;
    }
    if (out.empty()) {
      out = neg ? "-" + body : body;
    } else {
      out += neg ? " - " : " + ";
      out += body;
    }
  }
  return out;
}

template std::string to_display_string(const ExactPolynomial&);
template std::string to_display_string(const RealPolynomial&);

nlohmann::json to_json(const ExactPolynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : p.terms()) terms.push_back({{"exps", exps_json(m)}, {"coef", rational_json(c)}});
  return {{"dim", p.dimension()}, {"terms", terms}};
}

nlohmann::json to_json(const RealPolynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : p.terms()) terms.push_back({{"exps", exps_json(m)}, {"coef", c}});
  return {{"dim", p.dimension()}, {"terms", terms}};
}

template <Coefficient T>
Polynomial<T> polynomial_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("polynomial must be a JSON object with 'dim' and 'terms'");
  for (const auto& [key, value] : j.items()) {
    if (key != "dim" && key != "terms") throw ConfigError("unknown polynomial key '" + key + "'");
  }
  if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 1) {
    throw ConfigError("polynomial 'dim' must be a positive integer");
  }
  if (!j.contains("terms") || !j["terms"].is_array()) throw ConfigError("polynomial 'terms' must be an array");
  Polynomial<T> p(j["dim"].get<std::size_t>());
  for (const auto& t : j["terms"]) {
    if (!t.is_object() || !t.contains("exps") || !t.contains("coef")) {
      throw ConfigError("each polynomial term needs 'exps' and 'coef'");
    }
    for (const auto& [key, value] : t.items()) {
      if (key != "exps" && key != "coef") throw ConfigError("unknown term key '" + key + "'");
    }
    Monomial m = monomial_from_json(t["exps"]);
    if (m.max_variable() > p.dimension()) {
      throw ConfigError("term uses x" + std::to_string(m.max_variable()) + " beyond dim " +
                        std::to_string(p.dimension()));
    }
    p.add_term(m, coef_from_json<T>(t["coef"]));
  }
  return p;
}

template ExactPolynomial polynomial_from_json<Rational>(const nlohmann::json&);
template RealPolynomial polynomial_from_json<double>(const nlohmann::json&);

std::uint64_t polynomial_hash(const RealPolynomial& p) {
  return fnv1a64(to_json(p).dump());
}

}  // namespace gamma_lab
