#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "app/output.hpp"
#include "app/run.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace exinf;
using namespace exinf::app;
namespace fs = std::filesystem;

namespace {

const char* kBox = R"(grid:
  q_min: 0.0
  q_max: 3.141592653589793
  n: 2001
potential:
  kind: free
states: 4
)";

const char* kFringes = R"(slits:
  separation: 1.0
  screen_distance: 50.0
  wavenumber: 62.83185307179586
  screen_halfwidth: 10.0
  bins: 2048
)";

class Scratch {
 public:
  explicit Scratch(const std::string& name)
      : dir_(fs::temp_directory_path() / ("exinf-cli-" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }

  fs::path file(const std::string& name, const std::string& content) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args, std::string* log_text = nullptr) {
  args.insert(args.begin(), "exinf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream log;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, log);
  if (log_text) *log_text = log.str();
  return code;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("parse_config applies documented defaults") {
  const ExperimentConfig c = parse_config(kBox, Command::eigensolve);
  REQUIRE(c.grid.has_value());
  CHECK(c.grid->size() == 2001);
  CHECK_FALSE(c.grid->periodic());
  CHECK(c.states == 4);
  CHECK(c.eigensolver.residual_tolerance == 1e-8);
  CHECK(c.eigensolver.degeneracy_tolerance == 1e-9);
  CHECK(c.echo["eigensolver"]["residual_tolerance"] == 1e-8);
  CHECK(c.echo["grid"]["boundary"] == "dirichlet");
  CHECK(c.warnings.empty());

  const ExperimentConfig v = parse_config(std::string(kBox), Command::variational);
  CHECK(v.echo["variational"]["tol"] == 1e-6);
  CHECK(v.echo["variational"]["scheme"] == "locally_optimal");
  CHECK(v.echo["seed"] == 0);

  const ExperimentConfig d = parse_config(kFringes, Command::doubleslit);
  CHECK(d.echo["slits"]["mode"] == "full");
  CHECK(d.slits.bins == 2048);
}

TEST_CASE("parse_config normalization band") {
  SUBCASE("slightly off alphas are renormalized with a warning") {
    // |alpha1|^2 + |alpha2|^2 = 1.0000001
    const std::string text = std::string(kFringes) + "  alpha1: 1.00000004999999875\n  alpha2: 0.0\n";
    const ExperimentConfig c = parse_config(text, Command::doubleslit);
    REQUIRE(c.warnings.size() == 1);
    CHECK(c.warnings[0].find("renormalized") != std::string::npos);
    CHECK(std::abs(std::norm(c.slits.alpha1) + std::norm(c.slits.alpha2) - 1.0) <= 1e-15);
  }
  SUBCASE("far-off alphas are rejected") {
    const std::string text = std::string(kFringes) + "  alpha1: 0.8\n  alpha2: 0.8\n";
    CHECK_THROWS_AS(parse_config(text, Command::doubleslit), ConfigError);
  }
  SUBCASE("complex coefficients") {
    const std::string text = std::string(kBox).replace(std::string(kBox).find("states: 4"), 9, "") +
                             "consistency:\n  states: [0, 1]\n  coefficients: [[0.6, 0.0], [0.0, 0.8]]\n"
                             "  assigned_energy: 1.0\n";
    const ExperimentConfig c = parse_config(text, Command::consistency);
    CHECK(c.consistency.coefficients[1] == Complex(0.0, 0.8));
    CHECK(c.warnings.empty());
  }
}

TEST_CASE("parse_config rejects bad documents") {
  auto field_of = [](const std::string& text, Command cmd) -> std::string {
    try {
      parse_config(text, cmd);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "<accepted>";
  };
  CHECK(field_of(std::string(kFringes).replace(std::string(kFringes).find("2048"), 4, "8"), Command::doubleslit) ==
        "slits.bins");
  CHECK(field_of(std::string(kFringes) + "  mode: partial\n  eta: 1.5\n", Command::doubleslit) == "slits.eta");
  CHECK(field_of(std::string(kFringes) + "  mode: partial\n", Command::doubleslit) == "slits");
  CHECK(field_of(std::string(kBox) + "colour: blue\n", Command::eigensolve) == "colour");
  CHECK(field_of(std::string(kBox) + "seed: 3\n", Command::eigensolve) == "seed");
  CHECK(field_of(std::string(kBox).replace(std::string(kBox).find("2001"), 4, "20.5"), Command::eigensolve) ==
        "grid.n");
  CHECK(field_of(std::string(kBox).replace(std::string(kBox).find("4\n"), 1, "3000"), Command::eigensolve) ==
        "states");
  CHECK(field_of(std::string(kBox).replace(std::string(kBox).find("free"), 4, "morse"), Command::eigensolve) ==
        "potential.kind");
  CHECK(field_of("command: sample\n" + std::string(kFringes), Command::doubleslit) == "command");

  SUBCASE("unknown keys carry a position") {
    try {
      parse_config(std::string(kBox) + "eigensolver:\n  residual_tol: 1e-9\n", Command::eigensolve);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.field() == "eigensolver.residual_tol");
      CHECK(e.where() == "line 9, column 3");
    }
  }
  SUBCASE("syntax errors carry a position") {
    try {
      parse_config("grid: [1, 2\nstates: 3\n", Command::eigensolve);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(e.where().rfind("line ", 0) == 0);
    }
  }
}

TEST_CASE("write_pattern_csv") {
  Scratch s("csv");
  SlitConfig c;
  c.bins = 16;
  const DetectorPattern p = pattern_wave(c);
  const fs::path a = s.dir() / "a.csv";
  const fs::path b = s.dir() / "b.csv";
  write_pattern_csv(p, a);
  write_pattern_csv(pattern_wave(c), b);
  const auto rows = read_csv(a);
  REQUIRE(rows.size() == 17);
  CHECK(rows[0] == std::vector<std::string>{"x", "probability", "intensity"});
  double total = 0.0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    REQUIRE(rows[r].size() == 3);
    total += std::stod(rows[r][1]);
    CHECK(std::stod(rows[r][1]) == p.probabilities[r - 1]);
  }
  CHECK(std::abs(total - 1.0) <= 1e-9);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).back() == '\n');
  CHECK_FALSE(fs::exists(s.dir() / "a.csv.tmp"));
  CHECK_THROWS_AS(write_pattern_csv(p, s.dir() / "missing" / "x.csv"), OutputError);
}

TEST_CASE("cli runs produce the expected artifacts") {
  Scratch s("runs");
  SUBCASE("eigensolve of the box") {
    const auto cfg = s.file("box.yaml", kBox);
    REQUIRE(cli({"eigensolve", "--config", cfg.string(), "--out", (s.dir() / "box").string()}) == 0);
    const auto rows = read_csv(s.dir() / "box" / "spectrum.csv");
    REQUIRE(rows.size() == 5);
    for (int k = 1; k <= 4; ++k) CHECK(std::abs(std::stod(rows[k][1]) - k * k) <= 0.005 * k * k);
    const auto summary = nlohmann::json::parse(slurp(s.dir() / "box" / "summary.json"));
    CHECK(summary["status"] == "ok");
    CHECK(summary["config"]["states"] == 4);
    CHECK(summary["config"]["eigensolver"]["residual_tolerance"] == 1e-8);
    CHECK(summary.contains("wall_time_seconds"));
    CHECK(summary["version"].is_string());
  }
  SUBCASE("consistency on an equal mix") {
    const std::string text = std::string(kBox).replace(std::string(kBox).find("states: 4"), 9, "") +
                             "consistency:\n  states: [0, 1]\n"
                             "  coefficients: [0.7071067811865476, 0.7071067811865476]\n"
                             "  assigned_energy: 2.5\n";
    const auto cfg = s.file("mix.yaml", text);
    REQUIRE(cli({"consistency", "--config", cfg.string(), "--out", (s.dir() / "mix").string()}) == 0);
    const auto report = nlohmann::json::parse(slurp(s.dir() / "mix" / "report.json"));
    CHECK(report["observable"] == false);
    CHECK(std::abs(report["energy_variance"].get<double>() - 2.25) <= 0.01);
  }
  SUBCASE("doubleslit fringe spacing") {
    const auto cfg = s.file("ds.yaml", kFringes);
    REQUIRE(cli({"doubleslit", "--config", cfg.string(), "--out", (s.dir() / "ds").string()}) == 0);
    const auto metrics = nlohmann::json::parse(slurp(s.dir() / "ds" / "metrics.json"));
    CHECK(std::abs(metrics["spacing"].get<double>() - 5.0) <= 0.1);
    CHECK(read_csv(s.dir() / "ds" / "pattern.csv").size() == 2049);
  }
}

TEST_CASE("cli exit codes") {
  Scratch s("codes");
  std::string log;
  CHECK(cli({"eigensolve", "--config", (s.dir() / "nope.yaml").string(), "--out", s.dir().string()}, &log) == 2);
  CHECK(log.find("cannot read") != std::string::npos);
  CHECK(cli({"teleport", "--config", "x.yaml"}) == 2);
  CHECK(cli({"eigensolve"}) == 2);
  CHECK(cli({"--help"}) == 0);

  const auto bad = s.file("bad.yaml", std::string(kFringes).replace(std::string(kFringes).find("2048"), 4, "8"));
  CHECK(cli({"doubleslit", "--config", bad.string(), "--out", (s.dir() / "bad").string()}, &log) == 2);
  CHECK(log.find("slits.bins") != std::string::npos);
  CHECK(log.find("line 6") != std::string::npos);
  const auto bad_summary = nlohmann::json::parse(slurp(s.dir() / "bad" / "summary.json"));
  CHECK(bad_summary["status"] == "config_error");
  CHECK(bad_summary["error"]["field"] == "slits.bins");

  const auto stuck = s.file("stuck.yaml", std::string(kBox) + "variational:\n  max_iters: 1\n  tol: 1.0e-12\n");
  CHECK(cli({"variational", "--config", stuck.string(), "--out", (s.dir() / "stuck").string()}) == 1);
  const auto summary = nlohmann::json::parse(slurp(s.dir() / "stuck" / "summary.json"));
  CHECK(summary["status"] == "failed");
  CHECK(summary["error"]["type"] == "convergence");
  CHECK(summary["error"]["residual"].get<double>() > 1e-12);
  CHECK(summary["config"]["variational"]["max_iters"] == 1);
}

TEST_CASE("cli runs are byte-reproducible") {
  Scratch s("repro");
  const auto box = s.file("box.yaml", kBox);
  const auto hits = s.file("hits.yaml", std::string(kFringes) + "hits: 100000\n");
  const auto small = s.file("var.yaml", "grid:\n  q_min: -5.0\n  q_max: 5.0\n  n: 401\n"
                                        "potential:\n  kind: harmonic\n  omega: 1.0\nstates: 3\nseed: 5\n");
  struct Case {
    std::string command;
    fs::path config;
    std::vector<std::string> files;
  };
  const std::vector<Case> cases{{"eigensolve", box, {"spectrum.csv", "states.csv"}},
                                {"variational", small, {"spectrum.csv", "states.csv"}},
                                {"doubleslit", s.file("ds.yaml", kFringes), {"pattern.csv", "metrics.json"}},
                                {"sample", hits, {"hits.csv"}}};
  for (const auto& c : cases) {
    const fs::path a = s.dir() / (c.command + "-a");
    const fs::path b = s.dir() / (c.command + "-b");
    REQUIRE(cli({c.command, "--config", c.config.string(), "--out", a.string()}) == 0);
    REQUIRE(cli({c.command, "--config", c.config.string(), "--out", b.string()}) == 0);
    for (const auto& f : c.files) CHECK_MESSAGE(slurp(a / f) == slurp(b / f), c.command << "/" << f);
  }

  SUBCASE("--seed overrides the configured seed") {
    REQUIRE(cli({"sample", "--config", hits.string(), "--out", (s.dir() / "s1").string(), "--seed", "1"}) == 0);
    REQUIRE(cli({"sample", "--config", hits.string(), "--out", (s.dir() / "s2").string(), "--seed", "2"}) == 0);
    CHECK(slurp(s.dir() / "s1" / "hits.csv") != slurp(s.dir() / "s2" / "hits.csv"));
    const auto summary = nlohmann::json::parse(slurp(s.dir() / "s2" / "summary.json"));
    CHECK(summary["config"]["seed"] == 2);
  }
}
