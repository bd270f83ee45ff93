#pragma once

// Config-driven experiment runner: schema-checked JSON configs, scenarios,
// CSV outputs and run manifests.

#include "gamma_lab/anticoncentration.hpp"
#include "gamma_lab/tv_bound.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace gamma_lab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.3.0";

enum class Scenario { clt_linear, chaos2, gamma_clt, beta_clt, cos2_counterexample, cw_sweep, tv_chain, custom };

std::string to_string(Scenario s);

struct CwSweepConfig {
  RealPolynomial polynomial{1};
  std::vector<double> alphas;
  std::size_t samples = 100000;
  unsigned stability_multiplier = 10;
};

struct ExperimentConfig {
  nlohmann::json source;  // normalized input, embedded in manifests
  Scenario scenario = Scenario::custom;
  MeasureFamily family = MeasureFamily::gaussian();
  std::uint64_t seed = 0;
  ChainConfig chain;           // chain scenarios
  std::vector<unsigned> n_grid;  // every scenario with an n grid
  CwSweepConfig cw;            // cw_sweep
};

/// Parses and validates a config. Malformed input (unknown keys, wrong types,
/// missing fields) is ConfigError; out-of-domain parameters are
/// PreconditionError; degenerate limits are DegenerateLimitError. Nothing is
/// computed here beyond exact moment checks.
ExperimentConfig parse_config(const nlohmann::json& j, std::optional<std::uint64_t> seed_override = std::nullopt);

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Config embedded in a manifest.
ExperimentConfig load_manifest(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override = std::nullopt);

struct OutputFile {
  std::string name;
  std::string content;
};

struct RunOutcome {
  std::vector<OutputFile> files;
  nlohmann::json manifest;
  std::size_t violations = 0;  // failed bound checks (chain scenarios)
};

RunOutcome run_experiment(const ExperimentConfig& cfg, unsigned threads);

/// Writes every output file and manifest.json into dir (created if needed).
void write_outputs(const RunOutcome& outcome, const std::filesystem::path& dir);

/// CSV renderers shared with the command line.
std::string chain_csv(const ChainResult& r);
std::string chain_replicates_csv(const ChainResult& r);

/// Whitespace-separated projection of a CSV with a '#' comment header.
/// Empty input gives an empty result and a warning on diag. Throws
/// ConfigError for missing or non-numeric columns.
std::string emit_plot_data(std::istream& csv, const std::vector<std::string>& columns, std::ostream& diag);

}  // namespace gamma_lab
