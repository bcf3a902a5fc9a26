#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tvopt/config.hpp"
#include "tvopt/runner.hpp"
#include "tvopt/solvers.hpp"

using namespace tvopt;
using namespace tvopt::cli;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("tvopt_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long count_lines(const std::string& text) {
  long n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

const char* kMinimalConfig =
    "version = 1\n"
    "[problem]\n"
    "generator = quadratic\n"
    "dim = 2\n"
    "horizon = 25\n"
    "eigenvalues = 1, 2\n"
    "seed = 3\n"
    "[solver]\n"
    "method = prox_gradient\n"
    "alpha = auto\n"
    "[metrics]\n"
    "series = tracking, regret, path_length, gradient_error, objective, "
    "objective_gap\n"
    "certificates = contraction\n";

}  // namespace

TEST_SUITE("config parsing") {
  TEST_CASE("sections, comments and lists") {
    ConfigFile cfg = ConfigFile::parse(
        "version = 1  # top level\n"
        "[problem]\n"
        "generator = quadratic\n"
        "eigenvalues = 1, 2, 3\n"
        "\n"
        "[solver:a]\n"
        "method = prox_gradient\n");
    CHECK(cfg.has("", "version"));
    CHECK(cfg.has("problem", "generator"));
    SectionReader problem(cfg, "problem");
    CHECK(problem.require("generator") == "quadratic");
    CHECK(problem.number_list("eigenvalues", {}) ==
          std::vector<double>{1.0, 2.0, 3.0});
    problem.finish();
    CHECK(cfg.sections() == std::vector<std::string>{"", "problem", "solver:a"});
  }

  TEST_CASE("unknown keys are named in the error") {
    ConfigFile cfg = ConfigFile::parse("[solver]\nstepsize_typo = 0.1\n");
    SectionReader reader(cfg, "solver");
    try {
      reader.finish();
      FAIL("expected a configuration error");
    } catch (const ConfigError& err) {
      CHECK(std::string(err.what()).find("stepsize_typo") != std::string::npos);
    }
  }

  TEST_CASE("duplicates and malformed lines are rejected") {
    CHECK_THROWS_AS(ConfigFile::parse("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse("[unterminated\n"), ConfigError);
    CHECK_THROWS_AS(ConfigFile::parse("just a line\n"), ConfigError);
  }

  TEST_CASE("serialize round-trips through parse") {
    ConfigFile cfg = ConfigFile::parse(kMinimalConfig);
    ConfigFile again = ConfigFile::parse(cfg.serialize());
    CHECK(cfg.serialize() == again.serialize());
  }
}

TEST_SUITE("toy generators") {
  TEST_CASE("linear drift moves the optimizer by a fixed step") {
    ToyQuadraticConfig cfg;
    cfg.dim = 2;
    cfg.horizon = 10;
    cfg.eigenvalues = {1.0, 2.0};
    cfg.drift = "linear";
    cfg.drift_step = 0.1;
    ToyQuadraticGen gen(cfg);
    for (long t = 1; t < 10; ++t)
      CHECK((gen.center_at(t) - gen.center_at(t - 1)).norm() ==
            doctest::Approx(0.1).epsilon(1e-12));
    ProblemSlice s = gen.slice_at(0);
    CHECK(s.smooth.mu == doctest::Approx(1.0));
    CHECK(s.smooth.lip == doctest::Approx(2.0));
  }

  TEST_CASE("rank-deficient quadratics advertise zero strong convexity") {
    ToyQuadraticConfig cfg;
    cfg.dim = 4;
    cfg.horizon = 5;
    cfg.eigenvalues = {1.0};
    cfg.rank = 2;
    cfg.rotate = true;
    cfg.seed = 9;
    ToyQuadraticGen gen(cfg);
    ProblemSlice s = gen.slice_at(0);
    CHECK(s.smooth.mu == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.smooth.lip == doctest::Approx(1.0));
  }

  TEST_CASE("the constrained instance solves to the constraint boundary") {
    ConstrainedQuadraticConfig cfg;
    ConstrainedQuadraticGen gen(cfg);
    auto oracle = solvers::batch_solve(gen.oracle_slice_at(0), 1e-12);
    CHECK(oracle.x_star[0] == doctest::Approx(1.0).epsilon(1e-10));
    // Operator [[1, -1], [1, r]] has top singular value ~1.5913 at r = 0.1.
    CHECK(gen.pd_lipschitz(0.1) == doctest::Approx(1.59130).epsilon(1e-4));
  }
}

TEST_SUITE("experiment runs") {
  TEST_CASE("a minimal run produces the documented files and row counts") {
    fs::path dir = fresh_dir("minimal");
    RunResult result =
        run_experiment(ConfigFile::parse(kMinimalConfig), dir / "out");
    CHECK(fs::exists(dir / "out" / "trace.csv"));
    CHECK(fs::exists(dir / "out" / "metrics.csv"));
    CHECK(fs::exists(dir / "out" / "bounds.csv"));
    CHECK(fs::exists(dir / "out" / "manifest.txt"));
    CHECK(fs::exists(dir / "out" / "config_resolved.ini"));
    // Exactly horizon data rows.
    CHECK(count_lines(slurp(dir / "out" / "trace.csv")) == 25 + 1);
    CHECK(result.solvers.size() == 1);
    CHECK(result.solvers[0].trace.size() == 25);
  }

  TEST_CASE("identical configs and seeds give identical checksums") {
    fs::path dir = fresh_dir("determinism");
    ConfigFile cfg = ConfigFile::parse(kMinimalConfig);
    run_experiment(cfg, dir / "a");
    run_experiment(cfg, dir / "b");
    CHECK(slurp(dir / "a" / "manifest.txt") == slurp(dir / "b" / "manifest.txt"));
    CHECK(slurp(dir / "a" / "trace.csv") == slurp(dir / "b" / "trace.csv"));
  }

  TEST_CASE("the manifest's config echo re-parses to the same resolved config") {
    fs::path dir = fresh_dir("echo");
    ConfigFile cfg = ConfigFile::parse(kMinimalConfig);
    run_experiment(cfg, dir / "out");
    ConfigFile echoed = ConfigFile::parse_file((dir / "out" / "config_resolved.ini").string());
    CHECK(echoed.serialize() == cfg.serialize());
  }

  TEST_CASE("unknown keys abort the run with the key name") {
    fs::path dir = fresh_dir("badkey");
    std::string bad = std::string(kMinimalConfig) + "[noise]\nstepsize_typo = 1\n";
    try {
      run_experiment(ConfigFile::parse(bad), dir / "out");
      FAIL("expected a configuration error");
    } catch (const ConfigError& err) {
      CHECK(std::string(err.what()).find("stepsize_typo") != std::string::npos);
    }
  }

  TEST_CASE("a primal-dual solver on an unconstrained problem is rejected") {
    fs::path dir = fresh_dir("mismatch");
    std::string bad =
        "version = 1\n"
        "[problem]\n"
        "generator = quadratic\n"
        "horizon = 10\n"
        "[solver]\n"
        "method = primal_dual\n"
        "alpha = 0.1\n";
    CHECK_THROWS_AS(run_experiment(ConfigFile::parse(bad), dir / "out"),
                    ConfigError);
  }

  TEST_CASE("missing or wrong version is rejected") {
    CHECK_THROWS_AS(
        run_experiment(ConfigFile::parse("[problem]\ngenerator = quadratic\n"),
                       fresh_dir("nover") / "out"),
        ConfigError);
    CHECK_THROWS_AS(
        run_experiment(ConfigFile::parse("version = 2\n"), fresh_dir("v2") / "out"),
        ConfigError);
  }

  TEST_CASE("the constrained preset instance tracks the regularized saddle") {
    std::string text =
        "version = 1\n"
        "[problem]\n"
        "generator = constrained_quadratic\n"
        "horizon = 1200\n"
        "[solver]\n"
        "method = primal_dual\n"
        "alpha = 0.05\n"
        "r = 0.1\n"
        "[metrics]\n"
        "series = tracking, regret, path_length, gradient_error, objective\n"
        "certificates = primal_dual\n";
    fs::path dir = fresh_dir("pd");
    RunResult result = run_experiment(ConfigFile::parse(text), dir / "out");
    const auto& trace = result.solvers[0].trace;
    CHECK(trace.records.back().x[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-5));
    REQUIRE(result.solvers[0].bounds.size() == 1);
    const auto& report = result.solvers[0].bounds[0];
    CHECK(report.applicable);
    CHECK(report.violation_count == 0);
    CHECK(fs::exists(dir / "out" / "bounds_summary.txt"));
  }
}

TEST_SUITE("sweep and report") {
  TEST_CASE("a three-seed sweep writes three summary rows") {
    fs::path dir = fresh_dir("sweep");
    ConfigFile cfg = ConfigFile::parse(kMinimalConfig);
    SweepResult result =
        run_sweep(cfg, {{"problem.seed", {"1", "2", "3"}}}, dir / "out");
    CHECK(result.total == 3);
    CHECK(result.failed == 0);
    std::string summary = slurp(dir / "out" / "summary.csv");
    CHECK(count_lines(summary) == 4);
    CHECK(summary.rfind("run,problem.seed,status,", 0) == 0);
    CHECK(fs::exists(dir / "out" / "run_002" / "trace.csv"));
  }

  TEST_CASE("an empty grid is an error") {
    CHECK_THROWS_AS(run_sweep(ConfigFile::parse(kMinimalConfig), {},
                              fresh_dir("sweep_empty") / "out"),
                    ConfigError);
  }

  TEST_CASE("failures are recorded and the sweep continues") {
    fs::path dir = fresh_dir("sweep_fail");
    ConfigFile cfg = ConfigFile::parse(kMinimalConfig);
    SweepResult result = run_sweep(
        cfg, {{"solver.alpha", {"auto", "not_a_number"}}}, dir / "out");
    CHECK(result.total == 2);
    CHECK(result.failed == 1);
    CHECK(fs::exists(dir / "out" / "run_001" / "error.txt"));
  }

  TEST_CASE("report turns metrics into per-method series files") {
    fs::path dir = fresh_dir("report");
    run_experiment(ConfigFile::parse(kMinimalConfig), dir / "out");
    auto files = write_report(dir / "out");
    REQUIRE(files.size() == 1);
    CHECK(files[0].filename() == "fig1_solver.dat");
    std::string body = slurp(files[0]);
    CHECK(body.rfind("# t |f_t(x_t) - f_t*|", 0) == 0);
    CHECK(count_lines(body) == 25 + 1);
  }

  TEST_CASE("report refuses an empty directory") {
    fs::path dir = fresh_dir("report_empty");
    CHECK_THROWS(write_report(dir));
  }
}

TEST_SUITE("serialization and environment") {
  TEST_CASE("trace values round-trip bit-faithfully through the csv") {
    fs::path dir = fresh_dir("g17");
    RunResult result =
        run_experiment(ConfigFile::parse(kMinimalConfig), dir / "out");
    const auto& trace = result.solvers[0].trace;
    std::ifstream in(dir / "out" / "trace.csv");
    std::string line;
    std::getline(in, line);  // header
    std::size_t row = 0;
    while (std::getline(in, line)) {
      std::istringstream ls(line);
      std::string cell;
      std::getline(ls, cell, ',');  // t
      std::getline(ls, cell, ',');  // f
      CHECK(std::stod(cell) == trace[row].f_value);
      std::getline(ls, cell, ',');  // e
      std::getline(ls, cell, ',');  // x0
      CHECK(std::stod(cell) == trace[row].x[0]);
      ++row;
    }
    CHECK(row == trace.size());
  }

  TEST_CASE("relative output paths resolve against the env root") {
    fs::path root = fresh_dir("envroot");
    setenv(kOutputRootEnv, root.c_str(), 1);
    CHECK(resolve_out_dir("abc") == root / "abc");
    CHECK(resolve_out_dir("/abs/path") == fs::path("/abs/path"));
    unsetenv(kOutputRootEnv);
    CHECK(resolve_out_dir("abc") == fs::path("abc"));
  }

  TEST_CASE("the consensus experiment accepts an edge-list graph file") {
    fs::path dir = fresh_dir("graphfile");
    fs::path graph = dir / "ring.txt";
    {
      std::ofstream out(graph);
      out << "# five-node ring\n";
      for (int i = 0; i < 5; ++i) out << i << ' ' << (i + 1) % 5 << '\n';
    }
    std::string text =
        "version = 1\n"
        "[experiment]\n"
        "kind = fig6\n"
        "seed = 2\n"
        "horizon = 25\n"
        "graph_file = " + graph.string() + "\n";
    RunResult result = run_experiment(ConfigFile::parse(text), dir / "out");
    CHECK(fs::exists(dir / "out" / "fig6.csv"));
    std::string body = slurp(dir / "out" / "fig6.csv");
    CHECK(count_lines(body) == 1 + 3 * 5 * 25);
  }

  TEST_CASE("report falls back to objective series for oracle-free runs") {
    fs::path dir = fresh_dir("objreport");
    std::string text =
        "version = 1\n"
        "[problem]\n"
        "generator = quadratic\n"
        "horizon = 8\n"
        "[solver]\n"
        "method = prox_gradient\n"
        "[metrics]\n"
        "series = objective\n";
    run_experiment(ConfigFile::parse(text), dir / "out");
    auto files = write_report(dir / "out");
    REQUIRE(files.size() == 1);
    CHECK(files[0].filename() == "series_solver_objective.dat");
  }
}

TEST_SUITE("presets") {
  TEST_CASE("every preset parses and carries explicit seeds") {
    for (const auto& name : preset_names()) {
      ConfigFile cfg = preset_config(name);
      bool has_seed = false;
      for (const auto& e : cfg.entries)
        has_seed |= e.key == "seed";
      CHECK(has_seed);
    }
    CHECK_THROWS_AS(preset_config("nope"), ConfigError);
  }

  TEST_CASE("seed override rewrites problem and noise seeds") {
    ConfigFile cfg = preset_config("feedback");
    override_seeds(cfg, 123);
    SectionReader problem(cfg, "problem");
    CHECK(problem.integer("seed", -1) == 123);
    SectionReader noise(cfg, "noise");
    CHECK(noise.integer("seed", -1) == 123 + 1000003);
  }
}
