#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gamma_lab/cli.hpp"
#include "gamma_lab/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace gamma_lab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gamma-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gamma_lab_unit_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

const char* kX2 = R"({"dim":1,"terms":[{"coef":1,"exps":[[1,2]]}]})";

}  // namespace

TEST_CASE("negative config corpus is rejected as config errors") {
  const std::vector<std::string> corpus{
      R"([])",
      R"({"scenario":"clt_linear","n_grid":[4]})",
      R"({"schema_version":2,"scenario":"clt_linear","n_grid":[4]})",
      R"({"schema_version":"1","scenario":"clt_linear","n_grid":[4]})",
      R"({"schema_version":1,"n_grid":[4]})",
      R"({"schema_version":1,"scenario":"fourier","n_grid":[4]})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"sede":3})",
      R"({"schema_version":1,"scenario":"clt_linear"})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[]})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[16,4]})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4,4]})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[2.5]})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[-1,4]})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"samples":"many"})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"samples":-5})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"seed":-1})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"bins":0})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"fm_grid":1})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"bound_grid":{"alpha_lo":1e-3,"beta":2}})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"bound_grid":{"alpha_hi":2}})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"eps_grid":{"lo":1,"hi":0.1,"points":3}})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"description":7})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"family":{"kind":"poisson"}})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"family":{"kind":"gamma"}})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"family":{"kind":"gaussian","sigma":2}})",
      R"({"schema_version":1,"scenario":"gamma_clt","n_grid":[4],"family":{"kind":"gaussian"}})",
      R"({"schema_version":1,"scenario":"beta_clt","n_grid":[4],"family":{"kind":"gamma","r":2}})",
      R"({"schema_version":1,"scenario":"clt_linear","n_grid":[4],"sequence":{"kind":"linear"}})",
      R"({"schema_version":1,"scenario":"tv_chain","n_grid":[4]})",
      R"({"schema_version":1,"scenario":"tv_chain","n_grid":[4],"sequence":{"kind":"quadratic"}})",
      R"({"schema_version":1,"scenario":"tv_chain","n_grid":[4],"sequence":{"kind":"fixed"}})",
      R"({"schema_version":1,"scenario":"tv_chain","n_grid":[4],"sequence":{"kind":"linear","value":2}})",
      R"({"schema_version":1,"scenario":"custom","n_grid":[4],"sequence":{"kind":"linear"}})",
      R"({"schema_version":1,"scenario":"custom","n_grid":[1],"sequence":{"kind":"custom","elements":[{"n":1}]}})",
      R"({"schema_version":1,"scenario":"cos2_counterexample"})",
      R"({"schema_version":1,"scenario":"cos2_counterexample","n_grid":[1],"samples":10})",
      R"({"schema_version":1,"scenario":"cw_sweep"})",
      R"({"schema_version":1,"scenario":"cw_sweep","polynomial":{"dim":1,"terms":[{"coef":1,"exps":[[2,1]]}]}})",
      R"({"schema_version":1,"scenario":"cw_sweep","polynomial":{"dim":1,"terms":[{"coef":1,"exps":[[1,1]]}]},
          "alphas":[0.1,0.01]})",
      R"({"schema_version":1,"scenario":"cw_sweep","polynomial":{"dim":1,"terms":[{"coef":1,"exps":[[1,1]]}]},
          "n_grid":[1]})",
  };
  const fs::path dir = scratch("corpus");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    INFO("corpus entry ", i, ": ", corpus[i]);
    CHECK_THROWS_AS(parse_config(json::parse(corpus[i])), ConfigError);
    const fs::path cfg = dir / ("bad" + std::to_string(i) + ".json");
    write_text(cfg, corpus[i]);
    const fs::path od = dir / ("out" + std::to_string(i));
    const CliResult r = cli({"run", "--config", cfg.string(), "--out", od.string()});
    CHECK(r.code == kExitConfig);
    CHECK_FALSE(fs::exists(od));
  }
  write_text(dir / "notjson.json", "{\"schema_version\": 1,");
  CHECK(cli({"run", "--config", (dir / "notjson.json").string(), "--out", (dir / "nj").string()}).code == kExitConfig);
  CHECK(cli({"run", "--config", (dir / "missing.json").string()}).code == kExitConfig);
}

TEST_CASE("out-of-domain family parameters exit with the precondition code") {
  const fs::path dir = scratch("domain");
  const std::vector<std::string> configs{
      R"({"schema_version":1,"scenario":"beta_clt","n_grid":[4],"family":{"kind":"beta","a":0.5,"b":2}})",
      R"({"schema_version":1,"scenario":"gamma_clt","n_grid":[4],"family":{"kind":"gamma","r":0.5}})",
  };
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const fs::path cfg = dir / ("c" + std::to_string(i) + ".json");
    write_text(cfg, configs[i]);
    const fs::path od = dir / ("o" + std::to_string(i));
    const CliResult r = cli({"run", "--config", cfg.string(), "--out", od.string()});
    CHECK(r.code == kExitPrecondition);
    CHECK(r.err.find("precondition") != std::string::npos);
    CHECK_FALSE(fs::exists(od));
    CHECK_THROWS_AS(parse_config(json::parse(configs[i])), PreconditionError);
  }
}

TEST_CASE("cos2 counterexample run") {
  const fs::path dir = scratch("cos2");
  write_text(dir / "cos2.json", R"({"schema_version":1,"scenario":"cos2_counterexample","n_grid":[1,5,10,50]})");
  const CliResult r = cli({"run", "--config", (dir / "cos2.json").string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "out" / "manifest.json"));
  const auto rows = csv_rows(read_text(dir / "out" / "cos2_counterexample.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"n", "d_kol", "d_tv", "d_fm"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double n = std::stod(rows[i][0]);
    CHECK(std::abs(std::stod(rows[i][1]) - 1.0 / (2.0 * std::numbers::pi * n)) <= 1e-9);
    CHECK(std::abs(std::stod(rows[i][2]) - 1.0 / std::numbers::pi) <= 1e-6);
    CHECK(std::stod(rows[i][3]) <= std::stod(rows[i][2]) * 2.0 + 1e-9);
  }
  const json manifest = json::parse(read_text(dir / "out" / "manifest.json"));
  CHECK(manifest.at("version") == kToolVersion);
  CHECK(manifest.at("outputs").size() == 1);
  CHECK(manifest.at("config").at("scenario") == "cos2_counterexample");
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.contains("timings_seconds"));
}

TEST_CASE("seed override and manifest rerun") {
  const fs::path dir = scratch("manifest");
  write_text(dir / "cw.json", R"({"schema_version":1,"scenario":"cw_sweep","seed":3,
      "polynomial":{"dim":1,"terms":[{"coef":1,"exps":[[1,1]]}]},"samples":20000,"stability_multiplier":0})");
  REQUIRE(cli({"run", "--config", (dir / "cw.json").string(), "--out", (dir / "a").string()}).code == 0);
  REQUIRE(cli({"--seed", "4", "run", "--config", (dir / "cw.json").string(), "--out", (dir / "b").string()}).code == 0);
  CHECK(read_text(dir / "a" / "cw_sweep.csv") != read_text(dir / "b" / "cw_sweep.csv"));
  for (const char* threads : {"1", "4", "8"}) {
    const fs::path re = dir / (std::string("re") + threads);
    REQUIRE(cli({"run", "--manifest", (dir / "b" / "manifest.json").string(), "--threads", threads, "--out",
                 re.string()})
                .code == 0);
    CHECK(read_text(re / "cw_sweep.csv") == read_text(dir / "b" / "cw_sweep.csv"));
  }
  const ExperimentConfig back = load_manifest(dir / "b" / "manifest.json");
  CHECK(back.seed == 4);
  CHECK(cli({"run"}).code == kExitConfig);
  CHECK(cli({"run", "--config", "x.json", "--manifest", "y.json"}).code == kExitConfig);
}

TEST_CASE("chain run writes tables and replicates") {
  const fs::path dir = scratch("chain");
  write_text(dir / "c.json", R"({"schema_version":1,"scenario":"chaos2","seed":9,"n_grid":[2,4],"samples":20000,
      "replicates":2,"kappa_samples":5000,"budget_samples":20000})");
  const CliResult r = cli({"run", "--config", (dir / "c.json").string(), "--out", (dir / "out").string()});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(read_text(dir / "out" / "chaos2.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].front() == "n");
  CHECK(csv_rows(read_text(dir / "out" / "chaos2_replicates.csv")).size() == 5);
  const CliResult t = cli({"tv-bound", "chain", "--config", (dir / "c.json").string(), "--out", (dir / "t").string()});
  CHECK(t.code == 0);
  CHECK(read_text(dir / "t" / "chaos2.csv") == read_text(dir / "out" / "chaos2.csv"));
  write_text(dir / "cos2.json", R"({"schema_version":1,"scenario":"cos2_counterexample","n_grid":[1]})");
  CHECK(cli({"tv-bound", "chain", "--config", (dir / "cos2.json").string(), "--out", (dir / "u").string()}).code ==
        kExitConfig);
}

TEST_CASE("emit plot data") {
  std::ostringstream diag;
  std::istringstream two("# produced by a test\nx,y\n1,2\n3,4\n5,6\n");
  const std::string data = emit_plot_data(two, {}, diag);
  CHECK(data == "# x y\n1 2\n3 4\n5 6\n");
  CHECK(diag.str().empty());

  std::istringstream empty("");
  CHECK(emit_plot_data(empty, {}, diag).empty());
  CHECK(diag.str().find("warning") != std::string::npos);

  std::istringstream chain("n,d_fm,d_tv_hat,kappa,budget,alpha_star,eps_star,bound\n4,0.1,0.2,1,1,0.1,0.1,3\n16,0.05,0.1,1,1,0.1,0.1,2\n");
  CHECK(emit_plot_data(chain, {"n", "d_tv_hat", "bound"}, diag) == "# n d_tv_hat bound\n4 0.2 3\n16 0.1 2\n");

  std::istringstream missing("x,y\n1,2\n");
  CHECK_THROWS_AS(emit_plot_data(missing, {"z"}, diag), ConfigError);
  std::istringstream text("x,y\n1,abc\n");
  CHECK_THROWS_AS(emit_plot_data(text, {}, diag), ConfigError);
  std::istringstream ragged("x,y\n1\n");
  CHECK_THROWS_AS(emit_plot_data(ragged, {"y"}, diag), ConfigError);

  const fs::path dir = scratch("plot");
  write_text(dir / "a.csv", "x,y\n1,2\n");
  const CliResult r = cli({"emit-plot", "--csv", (dir / "a.csv").string(), "--columns", "y"});
  CHECK(r.code == 0);
  CHECK(r.out == "# y\n2\n");
  CHECK(cli({"emit-plot", "--csv", (dir / "a.csv").string(), "--columns", "q"}).code == kExitConfig);
  CHECK(cli({"emit-plot", "--csv", (dir / "a.csv").string(), "--out", (dir / "a.dat").string()}).code == 0);
  CHECK(read_text(dir / "a.dat") == "# x y\n1 2\n");
}

TEST_CASE("symbolic subcommands") {
  const CliResult g = cli({"generator", "--poly", kX2});
  REQUIRE(g.code == 0);
  const ExactPolynomial lx2 = polynomial_from_json<Rational>(json::parse(g.out));
  ExactPolynomial want = ExactPolynomial::constant(1, Rational(2));
  want.add_term(Monomial::variable(1, 2), Rational(-2));
  CHECK(lx2 == want);

  const CliResult e = cli({"--exact", "gamma", "--poly", kX2, "--family", "gamma", "--r", "2"});
  REQUIRE(e.code == 0);
  CHECK(polynomial_from_json<Rational>(json::parse(e.out)) ==
        ExactPolynomial::term(1, Monomial::variable(1, 3), Rational(4)));

  const CliResult d = cli({"decompose", "--poly", R"({"dim":2,"terms":[{"coef":1,"exps":[[1,1],[2,1]]},{"coef":1,"exps":[[1,1]]}]})"});
  REQUIRE(d.code == 0);
  const json dj = json::parse(d.out);
  REQUIRE(dj.at("components").size() == 2);
  CHECK(dj.at("components")[0].at("lambda").get<double>() == 1.0);
  CHECK(dj.at("components")[1].at("lambda").get<double>() == 2.0);

  const CliResult p = cli({"--exact", "poincare", "--poly", R"({"dim":1,"terms":[{"coef":1,"exps":[[1,1]]}]})",
                           "--family", "beta", "--a", "2", "--b", "2"});
  REQUIRE(p.code == 0);
  const json pj = json::parse(p.out);
  CHECK(pj.at("holds") == true);
  CHECK(pj.at("lambda1") == 4);
  CHECK(pj.at("lambda1_stated") == 3);

  const fs::path dir = scratch("poly");
  write_text(dir / "q.json", kX2);
  CHECK(cli({"generator", "--poly", "@" + (dir / "q.json").string()}).out == g.out);
  CHECK(cli({"generator", "--poly", (dir / "q.json").string()}).out == g.out);

  CHECK(cli({"generator", "--poly", R"({"dim":1})"}).code == kExitConfig);
  CHECK(cli({"generator", "--poly", kX2, "--family", "beta", "--a", "0.5", "--b", "2"}).code == kExitPrecondition);
  CHECK(cli({"generator", "--poly", kX2, "--family", "cauchy"}).code == kExitConfig);
  CHECK(cli({"decompose", "--poly", R"({"dim":1,"terms":[{"coef":1,"exps":[[1,9]]}]})"}).code == kExitPrecondition);
  CHECK(cli({}).code == kExitConfig);
  CHECK(cli({"frobnicate"}).code == kExitConfig);
}

TEST_CASE("literal drift through the command line") {
  const CliResult r = cli({"--exact", "poincare", "--poly", R"({"dim":1,"terms":[{"coef":1,"exps":[[1,1]]}]})",
                           "--family", "gamma", "--r", "2", "--shifted-drift"});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find("disagree") != std::string::npos);
  const CliResult g = cli({"--exact", "generator", "--poly", R"({"dim":1,"terms":[{"coef":1,"exps":[[1,1]]}]})",
                           "--family", "gamma", "--r", "2", "--shifted-drift"});
  REQUIRE(g.code == 0);
  // L x = r + 1 - x.
  CHECK(polynomial_from_json<Rational>(json::parse(g.out)) ==
        ExactPolynomial::constant(1, Rational(3)) - ExactPolynomial::variable(1, 1));
}

TEST_CASE("distance subcommand") {
  const CliResult k = cli({"distance", "--metric", "kol", "--left", "analytic:cos2:n=5", "--right", "analytic:uniform"});
  REQUIRE(k.code == 0);
  const auto rows = csv_rows(k.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"metric", "estimate", "method", "uncertainty", "params"});
  CHECK(std::abs(std::stod(rows[1][1]) - 1.0 / (10.0 * std::numbers::pi)) <= 1e-9);
  CHECK(rows[1][2] == "closed-form");

  const CliResult n = cli({"distance", "--metric", "kol", "--left", "analytic:cos2:n=5", "--right", "analytic:uniform",
                           "--no-closed-form"});
  REQUIRE(n.code == 0);
  CHECK(std::abs(std::stod(csv_rows(n.out)[1][1]) - 1.0 / (10.0 * std::numbers::pi)) <= 1e-9);
  CHECK(csv_rows(n.out)[1][2] != "closed-form");

  const fs::path dir = scratch("dist");
  const CliResult s = cli({"--out", (dir / "x.samples").string(), "sample", "--m", "1", "--n", "2000"});
  REQUIRE(s.code == 0);
  const CliResult e = cli({"distance", "--metric", "kol", "--left", "@" + (dir / "x.samples").string(), "--right",
                           "analytic:gaussian"});
  REQUIRE(e.code == 0);
  CHECK(std::stod(csv_rows(e.out)[1][1]) < 1.6276 / std::sqrt(2000.0));
  const CliResult p = cli({"distance", "--metric", "tv", "--left", std::string("poly:") + kX2 + ":family=gaussian:n=1000:seed=3",
                           "--right", "analytic:gaussian"});
  CHECK(p.code == 0);

  CHECK(cli({"distance", "--metric", "w2", "--left", "analytic:uniform", "--right", "analytic:uniform"}).code ==
        kExitConfig);
  CHECK(cli({"distance", "--metric", "tv", "--left", "analytic:cauchy", "--right", "analytic:uniform"}).code ==
        kExitConfig);
  CHECK(cli({"distance", "--metric", "tv", "--left", "@" + (dir / "none.samples").string(), "--right",
             "analytic:uniform"})
            .code == kExitConfig);
}

TEST_CASE("anticoncentration subcommands") {
  const char* x1 = R"({"dim":1,"terms":[{"coef":1,"exps":[[1,1]]}]})";
  const CliResult c = cli({"cw-check", "--poly", x1, "--alphas", "0.01,0.1,1", "--samples", "20000", "--stability", "0"});
  REQUIRE(c.code == 0);
  const auto rows = csv_rows(c.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"alpha", "estimate", "stderr", "ratio"});
  CHECK(c.err.find("c_hat") != std::string::npos);

  const CliResult s = cli({"smoothed-functional", "--poly", R"({"dim":2,"terms":[{"coef":1,"exps":[[1,1],[2,1]]}]})",
                           "--eps", "1e-4:1:5", "--samples", "20000"});
  REQUIRE(s.code == 0);
  const auto srows = csv_rows(s.out);
  REQUIRE(srows.size() == 6);
  CHECK(srows[0] == std::vector<std::string>{"eps", "estimate", "stderr", "ratio"});
  for (std::size_t i = 2; i < srows.size(); ++i) CHECK(std::stod(srows[i][1]) >= std::stod(srows[i - 1][1]));

  CHECK(cli({"cw-check", "--poly", x1, "--alphas", "1,0.1"}).code == kExitPrecondition);
  CHECK(cli({"cw-check", "--poly", x1, "--alphas", "a:b:c"}).code == kExitConfig);
  CHECK(cli({"cw-check", "--poly", R"({"dim":1,"terms":[]})", "--samples", "100"}).code == kExitPrecondition);
}

TEST_CASE("tv-bound subcommands") {
  const CliResult e = cli({"tv-bound", "evaluate", "--d-fm", "0.01", "--kappa", "1", "--d", "1", "--budget", "1",
                           "--alpha", "0.1", "--eps", "0.001"});
  REQUIRE(e.code == 0);
  const auto rows = csv_rows(e.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].back() == "rhs_total");
  CHECK(std::stod(rows[1].back()) == doctest::Approx(evaluate_bound(0.01, 1.0, 1, 1.0, 0.1, 0.001).rhs_total));

  const CliResult o = cli({"tv-bound", "optimize", "--d-fm", "0.01", "--kappa", "1", "--d", "1", "--budget", "1"});
  REQUIRE(o.code == 0);
  CHECK(std::stod(csv_rows(o.out)[1].back()) == doctest::Approx(optimize_bound(0.01, 1.0, 1, 1.0).rhs_total));

  const fs::path dir = scratch("bound");
  write_text(dir / "b.json", R"({"d_fm":0,"kappa":1,"d":1,"budget":0,"bound_grid":{"eps_lo":1e-12,"eps_points":10}})");
  const CliResult j = cli({"tv-bound", "optimize", "--config", (dir / "b.json").string()});
  REQUIRE(j.code == 0);
  CHECK(std::stod(csv_rows(j.out)[1].back()) == doctest::Approx(4.0 * 1e-4));
  write_text(dir / "bad.json", R"({"d_fm":0,"kappa":1,"d":1,"budget":0,"gamma":2})");
  CHECK(cli({"tv-bound", "optimize", "--config", (dir / "bad.json").string()}).code == kExitConfig);

  CHECK(cli({"tv-bound", "evaluate", "--d-fm", "0.01", "--kappa", "1", "--d", "1", "--budget", "1", "--alpha", "2",
             "--eps", "0.1"})
            .code == kExitPrecondition);
  CHECK(cli({"tv-bound", "evaluate", "--d-fm", "-1", "--kappa", "1", "--d", "1", "--budget", "1", "--alpha", "0.5",
             "--eps", "0.1"})
            .code == kExitPrecondition);
}
