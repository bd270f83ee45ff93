#include "gamma_lab/experiment.hpp"

#include "gamma_lab/rng.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace gamma_lab {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

std::uint64_t get_uint(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError(where + "." + key + " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

double get_double(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

template <class T>
T uint_or(const json& j, const std::string& key, const std::string& where, T fallback) {
  return j.contains(key) ? static_cast<T>(get_uint(j, key, where)) : fallback;
}

std::vector<double> parse_grid(const json& j, const std::string& where) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const auto& v : j) {
      if (!v.is_number()) throw ConfigError(where + " entries must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  check_keys(j, {"lo", "hi", "points"}, where);
  for (const char* k : {"lo", "hi", "points"}) {
    if (!j.contains(k)) throw ConfigError(where + " needs '" + k + "'");
  }
  const double lo = get_double(j, "lo", where);
  const double hi = get_double(j, "hi", where);
  const auto points = get_uint(j, "points", where);
  if (!(lo > 0.0) || !(hi >= lo) || points == 0) throw ConfigError(where + " needs 0 < lo <= hi and points >= 1");
  return log_grid(lo, hi, points);
}

BoundGrid parse_bound_grid(const json& j) {
  const std::string where = "bound_grid";
  check_keys(j, {"alpha_lo", "alpha_hi", "alpha_points", "eps_lo", "eps_hi", "eps_points"}, where);
  BoundGrid g;
  if (j.contains("alpha_lo")) g.alpha_lo = get_double(j, "alpha_lo", where);
  if (j.contains("alpha_hi")) g.alpha_hi = get_double(j, "alpha_hi", where);
  if (j.contains("eps_lo")) g.eps_lo = get_double(j, "eps_lo", where);
  if (j.contains("eps_hi")) g.eps_hi = get_double(j, "eps_hi", where);
  g.alpha_points = uint_or<std::size_t>(j, "alpha_points", where, g.alpha_points);
  g.eps_points = uint_or<std::size_t>(j, "eps_points", where, g.eps_points);
  if (!(g.alpha_lo > 0.0) || !(g.alpha_hi >= g.alpha_lo) || g.alpha_hi > 1.0 || g.alpha_points == 0) {
    throw ConfigError("bound_grid alpha range must satisfy 0 < alpha_lo <= alpha_hi <= 1");
  }
  if (!(g.eps_lo > 0.0) || !(g.eps_hi >= g.eps_lo) || g.eps_points == 0) {
    throw ConfigError("bound_grid eps range must satisfy 0 < eps_lo <= eps_hi");
  }
  return g;
}

std::vector<unsigned> parse_n_grid(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("n_grid must be a nonempty array of positive integers");
  std::vector<unsigned> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
      throw ConfigError("n_grid must be a nonempty array of positive integers");
    }
    out.push_back(v.get<unsigned>());
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i] <= out[i - 1]) throw ConfigError("n_grid must be strictly ascending");
  }
  return out;
}

SequenceSpec parse_sequence(const json& j, const MeasureFamily& family) {
  check_keys(j, {"kind", "base", "value", "elements"}, "sequence");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw ConfigError("sequence.kind must be a string");
  SequenceSpec s;
  s.family = family;
  s.kind = parse_sequence_kind(j.at("kind").get<std::string>());
  auto forbid = [&](const char* key) {
    if (j.contains(key)) throw ConfigError(std::string("sequence.") + key + " is not used by kind " + to_string(s.kind));
  };
  switch (s.kind) {
    case SequenceKind::fixed:
      if (!j.contains("base")) throw ConfigError("fixed sequence needs 'base'");
      s.base = polynomial_from_json<double>(j.at("base"));
      forbid("value");
      forbid("elements");
      break;
    case SequenceKind::constant:
      if (!j.contains("value")) throw ConfigError("constant sequence needs 'value'");
      s.constant_value = get_double(j, "value", "sequence");
      forbid("base");
      forbid("elements");
      break;
    case SequenceKind::custom:
      if (!j.contains("elements") || !j.at("elements").is_array()) {
        throw ConfigError("custom sequence needs an 'elements' array");
      }
      for (const auto& e : j.at("elements")) {
        check_keys(e, {"n", "polynomial"}, "sequence.elements[]");
        if (!e.contains("n") || !e.contains("polynomial")) throw ConfigError("sequence element needs n and polynomial");
        s.elements[static_cast<unsigned>(get_uint(e, "n", "sequence.elements[]"))] =
            polynomial_from_json<double>(e.at("polynomial"));
      }
      forbid("base");
      forbid("value");
      break;
    default:
      forbid("base");
      forbid("value");
      forbid("elements");
  }
  return s;
}

Scenario parse_scenario(const std::string& text) {
  for (Scenario s : {Scenario::clt_linear, Scenario::chaos2, Scenario::gamma_clt, Scenario::beta_clt,
                     Scenario::cos2_counterexample, Scenario::cw_sweep, Scenario::tv_chain, Scenario::custom}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("unknown scenario '" + text + "'");
}

bool is_chain(Scenario s) {
  return s == Scenario::clt_linear || s == Scenario::chaos2 || s == Scenario::gamma_clt ||
         s == Scenario::beta_clt || s == Scenario::tv_chain || s == Scenario::custom;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::clt_linear:
      return "clt_linear";
    case Scenario::chaos2:
      return "chaos2";
    case Scenario::gamma_clt:
      return "gamma_clt";
    case Scenario::beta_clt:
      return "beta_clt";
    case Scenario::cos2_counterexample:
      return "cos2_counterexample";
    case Scenario::cw_sweep:
      return "cw_sweep";
    case Scenario::tv_chain:
      return "tv_chain";
    case Scenario::custom:
      return "custom";
  }
  return "?";
}

ExperimentConfig parse_config(const json& input, std::optional<std::uint64_t> seed_override) {
  if (!input.is_object()) throw ConfigError("config must be a JSON object");
  if (!input.contains("schema_version")) throw ConfigError("config lacks schema_version");
  if (!input.at("schema_version").is_number_integer() || input.at("schema_version").get<int>() != kSchemaVersion) {
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }
  if (!input.contains("scenario") || !input.at("scenario").is_string()) {
    throw ConfigError("config needs a string 'scenario'");
  }
  ExperimentConfig cfg;
  cfg.scenario = parse_scenario(input.at("scenario").get<std::string>());
  std::set<std::string> allowed{"schema_version", "scenario", "description", "family", "seed"};
  if (is_chain(cfg.scenario)) {
    allowed.insert({"n_grid", "samples", "replicates", "kappa_samples", "budget_samples", "eps_grid", "bound_grid",
                    "bins", "fm_grid"});
    if (cfg.scenario == Scenario::tv_chain || cfg.scenario == Scenario::custom) allowed.insert("sequence");
  } else if (cfg.scenario == Scenario::cos2_counterexample) {
    allowed.insert("n_grid");
  } else {
    allowed.insert({"polynomial", "alphas", "samples", "stability_multiplier"});
  }
  check_keys(input, allowed, "config");
  if (input.contains("description") && !input.at("description").is_string()) {
    throw ConfigError("description must be a string");
  }

  json normalized = input;
  if (seed_override) normalized["seed"] = *seed_override;
  cfg.seed = normalized.contains("seed") ? get_uint(normalized, "seed", "config") : 0;
  normalized["seed"] = cfg.seed;

  // Family defaults per scenario.
  if (input.contains("family")) {
    cfg.family = MeasureFamily::from_json(input.at("family"));
  } else if (cfg.scenario == Scenario::gamma_clt) {
    cfg.family = MeasureFamily::gamma(Rational(2));
  } else if (cfg.scenario == Scenario::beta_clt) {
    cfg.family = MeasureFamily::beta(Rational(2), Rational(2));
  }
  if (cfg.scenario == Scenario::gamma_clt && cfg.family.kind() != FamilyKind::gamma) {
    throw ConfigError("gamma_clt needs a gamma family");
  }
  if (cfg.scenario == Scenario::beta_clt && cfg.family.kind() != FamilyKind::beta) {
    throw ConfigError("beta_clt needs a beta family");
  }
  normalized["family"] = cfg.family.to_json();

  if (cfg.scenario == Scenario::cos2_counterexample) {
    if (!input.contains("n_grid")) throw ConfigError("cos2_counterexample needs n_grid");
    cfg.n_grid = parse_n_grid(input.at("n_grid"));
  } else if (cfg.scenario == Scenario::cw_sweep) {
    if (!input.contains("polynomial")) throw ConfigError("cw_sweep needs a polynomial");
    cfg.cw.polynomial = polynomial_from_json<double>(input.at("polynomial"));
    cfg.cw.alphas = input.contains("alphas") ? parse_grid(input.at("alphas"), "alphas") : log_grid(1e-3, 1.0, 13);
    cfg.cw.samples = uint_or<std::size_t>(input, "samples", "config", cfg.cw.samples);
    cfg.cw.stability_multiplier = uint_or<unsigned>(input, "stability_multiplier", "config", 10);
    if (cfg.cw.samples == 0) throw ConfigError("samples must be positive");
    for (std::size_t i = 0; i < cfg.cw.alphas.size(); ++i) {
      if (!(cfg.cw.alphas[i] > 0.0) || (i > 0 && !(cfg.cw.alphas[i] > cfg.cw.alphas[i - 1]))) {
        throw ConfigError("alphas must be positive and ascending");
      }
    }
    if (cfg.cw.polynomial.degree().value_or(0) < 1 && cfg.cw.polynomial.is_zero()) {
      throw PreconditionError("cw_sweep: the zero polynomial is degenerate");
    }
    const ProductMeasure mu(cfg.family, cfg.cw.polynomial.dimension());
    if (!(expectation(cfg.cw.polynomial * cfg.cw.polynomial, mu) > 0.0)) {
      throw PreconditionError("cw_sweep: E[Q^2] = 0 (degenerate polynomial)");
    }
  } else {
    ChainConfig& c = cfg.chain;
    if (!input.contains("n_grid")) throw ConfigError(to_string(cfg.scenario) + " needs n_grid");
    c.n_grid = parse_n_grid(input.at("n_grid"));
    cfg.n_grid = c.n_grid;
    c.seed = cfg.seed;
    c.samples = uint_or<std::size_t>(input, "samples", "config", c.samples);
    c.replicates = uint_or<unsigned>(input, "replicates", "config", c.replicates);
    c.kappa_samples = uint_or<std::size_t>(input, "kappa_samples", "config", c.kappa_samples);
    c.budget_samples = uint_or<std::size_t>(input, "budget_samples", "config", c.budget_samples);
    if (input.contains("eps_grid")) c.eps_grid = parse_grid(input.at("eps_grid"), "eps_grid");
    if (input.contains("bound_grid")) c.bound_grid = parse_bound_grid(input.at("bound_grid"));
    if (input.contains("bins")) {
      c.distance.bins = uint_or<std::size_t>(input, "bins", "config", 0);
      if (*c.distance.bins == 0) throw ConfigError("bins must be positive");
    }
    c.distance.fm_grid = uint_or<std::size_t>(input, "fm_grid", "config", c.distance.fm_grid);
    if (c.distance.fm_grid < 2) throw ConfigError("fm_grid must be at least 2");
    switch (cfg.scenario) {
      case Scenario::chaos2:
        c.sequence.kind = SequenceKind::chaos2;
        break;
      case Scenario::tv_chain:
      case Scenario::custom:
        if (!input.contains("sequence")) throw ConfigError(to_string(cfg.scenario) + " needs a sequence");
        c.sequence = parse_sequence(input.at("sequence"), cfg.family);
        if (cfg.scenario == Scenario::custom && c.sequence.kind != SequenceKind::custom) {
          throw ConfigError("scenario custom needs sequence.kind = custom");
        }
        break;
      default:
        c.sequence.kind = SequenceKind::linear;
    }
    c.sequence.family = cfg.family;
    validate_chain(c);
  }
  cfg.source = std::move(normalized);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, seed_override);
}

ExperimentConfig load_manifest(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("config")) throw ConfigError("manifest has no config");
  return parse_config(j.at("config"), seed_override);
}

std::string chain_csv(const ChainResult& r) {
  std::ostringstream os;
  os << "n,d_fm,d_tv_hat,kappa,budget,alpha_star,eps_star,bound\n";
  for (const auto& row : r.rows) {
    os << row.n << ',' << fmt(row.d_fm) << ',' << fmt(row.d_tv_hat) << ',' << fmt(row.kappa) << ','
       << fmt(row.budget) << ',' << fmt(row.alpha_star) << ',' << fmt(row.eps_star) << ',' << fmt(row.bound) << '\n';
  }
  return os.str();
}

std::string chain_replicates_csv(const ChainResult& r) {
  std::ostringstream os;
  os << "replicate,n,seed,d_fm,d_tv_hat,d_tv_se,bound,within\n";
  for (const auto& rep : r.replicates) {
    os << rep.replicate << ',' << rep.n << ',' << rep.seed << ',' << fmt(rep.d_fm) << ',' << fmt(rep.d_tv_hat) << ','
       << fmt(rep.d_tv_se) << ',' << fmt(rep.bound) << ',' << (rep.within ? 1 : 0) << '\n';
  }
  return os.str();
}

RunOutcome run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  using clock = std::chrono::steady_clock;
  RunOutcome out;
  json timings = json::object();
  json summary = json::object();
  const std::string name = to_string(cfg.scenario);
  const auto start = clock::now();

  if (cfg.scenario == Scenario::cos2_counterexample) {
    std::ostringstream os;
    os << "n,d_kol,d_tv,d_fm\n";
    const AnalyticLaw u = AnalyticLaw::uniform(0.0, std::numbers::pi);
    for (unsigned n : cfg.n_grid) {
      const AnalyticLaw c = AnalyticLaw::cos2(n);
      os << n << ',' << fmt(kolmogorov(c, u).estimate) << ',' << fmt(total_variation(c, u).estimate) << ','
         << fmt(fortet_mourier(c, u).estimate) << '\n';
    }
    out.files.push_back({name + ".csv", os.str()});
  } else if (cfg.scenario == Scenario::cw_sweep) {
    const ProductMeasure mu(cfg.family, cfg.cw.polynomial.dimension());
    const CWReport r = carbery_wright_check(cfg.cw.polynomial, mu, cfg.cw.alphas, cfg.cw.samples,
                                            derive_seed(cfg.seed, "cw_sweep"), threads, cfg.cw.stability_multiplier);
    std::ostringstream os;
    os << "alpha,estimate,stderr,ratio,ratio_stderr\n";
    for (std::size_t i = 0; i < r.ratios.size(); ++i) {
      os << fmt(r.curve.alphas[i]) << ',' << fmt(r.curve.probs[i]) << ',' << fmt(r.curve.standard_errors[i]) << ','
         << fmt(r.ratios[i]) << ',' << fmt(r.ratio_errors[i]) << '\n';
    }
    out.files.push_back({name + ".csv", os.str()});
    summary["k"] = r.k;
    summary["c_hat"] = r.c_hat;
    if (r.c_hat_check) summary["c_hat_check"] = *r.c_hat_check;
    summary["stability_factor"] = std::isfinite(r.stability_factor) ? json(r.stability_factor) : json("inf");
    summary["stable"] = r.stable;
  } else {
    const ChainResult r = tv_chain_experiment(cfg.chain, threads);
    out.files.push_back({name + ".csv", chain_csv(r)});
    out.files.push_back({name + "_replicates.csv", chain_replicates_csv(r)});
    out.violations = r.violations;
    summary["degree"] = r.degree;
    summary["budget_sup"] = r.budget_sup;
    summary["kappa"] = r.kappa.kappa;
    summary["kappa_upper"] = r.kappa.kappa_upper;
    summary["violations"] = r.violations;
  }
  timings[name] = std::chrono::duration<double>(clock::now() - start).count();

  json outputs = json::array();
  for (const auto& f : out.files) {
    outputs.push_back({{"path", f.name}, {"bytes", f.content.size()}, {"fnv1a64", hex64(fnv1a64(f.content))}});
  }
  out.manifest = {{"tool", "gamma-lab"},
                  {"version", kToolVersion},
                  {"config", cfg.source},
                  {"config_hash", hex64(fnv1a64(cfg.source.dump()))},
                  {"seed", cfg.seed},
                  {"threads", threads},
                  {"timings_seconds", timings},
                  {"summary", summary},
                  {"outputs", outputs}};
  return out;
}

void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& f : outcome.files) {
    std::ofstream os(dir / f.name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / f.name).string());
    os << f.content;
  }
  std::ofstream os(dir / "manifest.json", std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  os << outcome.manifest.dump(2) << '\n';
}

std::string emit_plot_data(std::istream& csv, const std::vector<std::string>& columns, std::ostream& diag) {
  std::string line;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(csv, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    header = split(line);
    break;
  }
  if (header.empty()) {
    diag << "warning: empty CSV, writing an empty data file\n";
    return {};
  }
  std::vector<std::size_t> pick;
  if (columns.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) pick.push_back(i);
  } else {
    for (const auto& c : columns) {
      auto it = std::find(header.begin(), header.end(), c);
      if (it == header.end()) throw ConfigError("column '" + c + "' not found in CSV header");
      pick.push_back(static_cast<std::size_t>(it - header.begin()));
    }
  }
  std::ostringstream out;
  out << "#";
  for (std::size_t i : pick) out << ' ' << header[i];
  out << '\n';
  std::size_t row = 0;
  while (std::getline(csv, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    ++row;
    const auto cells = split(line);
    for (std::size_t k = 0; k < pick.size(); ++k) {
      if (pick[k] >= cells.size()) throw ConfigError("row " + std::to_string(row) + " is missing a column");
      const std::string& cell = cells[pick[k]];
      char* end = nullptr;
      std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size()) {
        throw ConfigError("non-numeric value '" + cell + "' in column " + header[pick[k]] + " (row " +
                          std::to_string(row) + ")");
      }
      out << (k ? " " : "") << cell;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gamma_lab
